"""Ideals on the positive integers with three-valued membership.

An ideal here is a descriptor (Fin, a summable ideal, the density-zero
ideal, an ideal generated by finitely many sets together with Fin, or an
intersection of two descriptors).  Membership of a symbolic set answers
``IN``, ``NOT_IN`` or ``UNKNOWN``; ``UNKNOWN`` means no decision procedure
applied, never a guess.  Divergence verdicts are comparison certificates only:
an infinite eventually-periodic part contains a progression, over which the
harmonic series diverges; registered sparse atoms carry a declared bound on
their reciprocal sum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .sets import (Complement, Registered, SymbolicSet, UndecidableShape, _Tokens, _parse_set,
                   ParseError, union)


class TriVerdict(enum.Enum):
    IN = "In"
    NOT_IN = "NotIn"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def of(cls, flag: Optional[bool]) -> "TriVerdict":
        if flag is None:
            return cls.UNKNOWN
        return cls.IN if flag else cls.NOT_IN


IN, NOT_IN, UNKNOWN = TriVerdict.IN, TriVerdict.NOT_IN, TriVerdict.UNKNOWN


class NotRepresentable(ValueError):
    """Raised for ideals that need the axiom of choice (maximal ideals, ultrafilters)."""


def _safe_is_finite(s: SymbolicSet) -> Optional[bool]:
    try:
        return s.is_finite()
    except UndecidableShape:
        return None


# ---------------------------------------------------------------------------
# weights: counting, harmonic, geometric
# ---------------------------------------------------------------------------


class Weights:
    """Positive weights w_n with certified sums over symbolic sets."""

    name: str
    divergent: bool

    def weight(self, n: int) -> Fraction:
        raise NotImplementedError

    def scaled_floor(self, n: int, bits: int) -> int:
        """floor(w_n * 2**bits)."""
        w = self.weight(n)
        return (w.numerator << bits) // w.denominator

    def diverges(self, s: SymbolicSet) -> Optional[bool]:
        """True/False when certified, None otherwise."""
        raise NotImplementedError

    def sum_bound(self, s: SymbolicSet) -> Optional[Fraction]:
        """Certified upper bound on sum_{n in s} w_n, or None."""
        raise NotImplementedError

    def partial_lower(self, s: SymbolicSet, k: int, bits: int = 64) -> Fraction:
        """Lower bound on sum_{n in s, n <= k} w_n (exact up to 2**-bits per term)."""
        acc = sum(self.scaled_floor(n, bits) for n in s.enumerate(k))
        return Fraction(acc, 1 << bits)


class CountingWeights(Weights):
    name = "counting"
    divergent = True

    def weight(self, n):
        return Fraction(1)

    def scaled_floor(self, n, bits):
        return 1 << bits

    def diverges(self, s):
        fin = _safe_is_finite(s)
        return None if fin is None else not fin

    def sum_bound(self, s):
        if _safe_is_finite(s):
            return Fraction(s.count(s._finite_bound() if s.atoms else s._normal.t))
        return None

    def partial_lower(self, s, k, bits=64):
        return Fraction(s.count(k))


class HarmonicWeights(Weights):
    name = "harmonic"
    divergent = True

    def weight(self, n):
        return Fraction(1, n)

    def scaled_floor(self, n, bits):
        return (1 << bits) // n

    def diverges(self, s):
        # atoms must be density-zero with a known reciprocal-sum bound
        if s.atoms and (s.harmonic_bound_of_atoms() is None
                        or any(Registered(a).info.density != 0 for a in s.atoms)):
            return None
        try:
            return not s.density_part().is_finite()
        except UndecidableShape:
            return None

    def sum_bound(self, s):
        if self.diverges(s) is not False:
            return None
        dense = s.density_part()
        exact = sum((Fraction(1, n) for n in dense.enumerate(dense._normal.t)), Fraction(0))
        return exact + (s.harmonic_bound_of_atoms() or 0)


class GeometricWeights(Weights):
    divergent = False

    def __init__(self, ratio: Fraction):
        ratio = Fraction(ratio)
        if not 0 < ratio < 1:
            raise ValueError("geometric weights need ratio in (0, 1)")
        self.ratio = ratio
        self.name = f"geometric {ratio.numerator}/{ratio.denominator}"

    def weight(self, n):
        return self.ratio ** n

    def diverges(self, s):
        return False

    def sum_bound(self, s):
        fin = _safe_is_finite(s)
        if fin:
            top = s._finite_bound() if s.atoms else s._normal.t
            return sum((self.ratio ** n for n in s.enumerate(top)), Fraction(0))
        return self.ratio / (1 - self.ratio)


WEIGHTS = {"counting": CountingWeights(), "harmonic": HarmonicWeights()}


# ---------------------------------------------------------------------------
# ideal descriptors
# ---------------------------------------------------------------------------


class Ideal:
    def membership(self, s: SymbolicSet) -> TriVerdict:
        raise NotImplementedError

    def to_expr(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_expr()


@dataclass(frozen=True)
class FinIdeal(Ideal):
    def membership(self, s):
        return TriVerdict.of(_safe_is_finite(s))

    def to_expr(self):
        return "(fin)"


@dataclass(frozen=True)
class SummableIdeal(Ideal):
    """Sets A with sum_{n in A} w_n < infinity, for divergent positive weights."""

    weights_name: str = "harmonic"

    def __post_init__(self):
        w = WEIGHTS.get(self.weights_name)
        if w is None or not w.divergent:
            raise ValueError(f"summable ideal needs divergent weights, got {self.weights_name!r}")

    @property
    def weights(self) -> Weights:
        return WEIGHTS[self.weights_name]

    def membership(self, s):
        if _safe_is_finite(s):
            return IN
        d = self.weights.diverges(s)
        return TriVerdict.of(None if d is None else not d)

    def to_expr(self):
        return f"(summable {self.weights_name})"


@dataclass(frozen=True)
class DensityIdeal(Ideal):
    def membership(self, s):
        d = s.density()
        if d is None:
            return UNKNOWN
        return IN if d == 0 else NOT_IN

    def to_expr(self):
        return "(density)"


@dataclass(frozen=True)
class GeneratedIdeal(Ideal):
    """The smallest ideal containing the generators and Fin."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if gens and _safe_is_finite(Complement(union(*gens))):
            raise ValueError("generators cover a cofinite set; that is not a proper ideal")

    def membership(self, s):
        if not self.generators:
            return TriVerdict.of(_safe_is_finite(s))
        rest = s - union(*self.generators)
        return TriVerdict.of(_safe_is_finite(rest))

    def to_expr(self):
        return "(generated" + "".join(" " + g.to_expr() for g in self.generators) + ")"


@dataclass(frozen=True)
class IntersectionIdeal(Ideal):
    left: Ideal
    right: Ideal

    def membership(self, s):
        a, b = self.left.membership(s), self.right.membership(s)
        if a is NOT_IN or b is NOT_IN:
            return NOT_IN
        if a is IN and b is IN:
            return IN
        return UNKNOWN

    def to_expr(self):
        return f"(cap {self.left.to_expr()} {self.right.to_expr()})"


FIN = FinIdeal()


def generated(*sets: SymbolicSet) -> GeneratedIdeal:
    return GeneratedIdeal(tuple(sets))


def maximal_ideal(*_args, **_kwargs):
    raise NotRepresentable("maximal ideals need the axiom of choice and have no finite description")


def membership(ideal: Ideal, s: SymbolicSet) -> TriVerdict:
    return ideal.membership(s)


def dual_filter_member(ideal: Ideal, s: SymbolicSet) -> TriVerdict:
    return ideal.membership(Complement(s))


def intersect_ideals(i: Ideal, j: Ideal) -> IntersectionIdeal:
    return IntersectionIdeal(i, j)


def ideal_generators(ideal: Ideal) -> Optional[list[SymbolicSet]]:
    """Generators of a generated ideal (intersections pair them up), else None."""
    if isinstance(ideal, FinIdeal):
        return []
    if isinstance(ideal, GeneratedIdeal):
        return list(ideal.generators)
    if isinstance(ideal, IntersectionIdeal):
        a, b = ideal_generators(ideal.left), ideal_generators(ideal.right)
        if a is None or b is None:
            return None
        return [g & h for g in a for h in b]
    return None


# ---------------------------------------------------------------------------
# Mazur-style submeasures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Submeasure:
    """phi(A) = sum_{n in A} w_n; counting weights give phi(A) = |A|."""

    weights: Weights

    @classmethod
    def counting(cls) -> "Submeasure":
        return cls(WEIGHTS["counting"])

    @classmethod
    def weighted(cls, name_or_ratio) -> "Submeasure":
        if name_or_ratio in WEIGHTS:
            return cls(WEIGHTS[name_or_ratio])
        return cls(GeometricWeights(Fraction(name_or_ratio)))

    def phi(self, s: SymbolicSet, k: int, bits: int = 64) -> Fraction:
        """Rational lower bound of phi(s ∩ {1..k})."""
        return self.weights.partial_lower(s, k, bits)


def submeasure_fin_membership(phi: Submeasure, s: SymbolicSet, bound: Fraction,
                              horizon: int) -> TriVerdict:
    """Decide ``s in Fin(phi)`` relative to a caller-chosen divergence threshold.

    NOT_IN once a certified lower bound of phi on a prefix exceeds ``bound``
    within ``horizon``; IN when a closed-form total at most ``bound`` is
    certified; UNKNOWN otherwise.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    bound = Fraction(bound)
    total = phi.weights.sum_bound(s)
    if total is not None and total <= bound:
        return IN
    w = phi.weights
    bits = 64
    acc, scale = 0, 1 << bits
    limit = bound * scale
    for n in s.enumerate(horizon) if s.atoms else _iter_members(s, horizon):
        acc += w.scaled_floor(n, bits)
        if acc > limit:
            return NOT_IN
    return UNKNOWN


def _iter_members(s: SymbolicSet, k: int):
    nf = s._normal
    for n in range(1, k + 1):
        if nf.member(n):
            yield n


# ---------------------------------------------------------------------------
# prefix grammar for ideals
# ---------------------------------------------------------------------------


def _parse_ideal(tk: _Tokens) -> Ideal:
    tk.expect("(", "ideal")
    head = tk.next("ideal")
    if head == "fin":
        tk.expect(")", "fin")
        return FIN
    if head == "density":
        tk.expect(")", "density")
        return DensityIdeal()
    if head == "summable":
        name = tk.next("summable")
        tk.expect(")", "summable")
        try:
            return SummableIdeal(name)
        except ValueError as e:
            raise ParseError(f"{e} in rule <summable>") from None
    if head == "generated":
        gens = []
        while tk.peek() != ")":
            gens.append(_parse_set(tk))
        tk.expect(")", "generated")
        try:
            return GeneratedIdeal(tuple(gens))
        except ValueError as e:
            raise ParseError(f"{e} in rule <generated>") from None
    if head == "cap":
        a = _parse_ideal(tk)
        b = _parse_ideal(tk)
        tk.expect(")", "cap")
        return IntersectionIdeal(a, b)
    if head in ("maximal", "ultrafilter"):
        raise NotRepresentable(f"{head!r} ideals have no finite description")
    raise ParseError(f"unknown ideal constructor {head!r} in rule <ideal>")


def parse_ideal(text: str) -> Ideal:
    """Parse ``(fin)``, ``(summable harmonic)``, ``(density)``,
    ``(generated S ...)`` or ``(cap I J)``."""
    tk = _Tokens(text)
    ideal = _parse_ideal(tk)
    tk.done()
    return ideal
