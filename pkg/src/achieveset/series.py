"""Series descriptors with certified tails.

Every descriptor knows its terms in closed form, encloses the absolute,
positive and negative tails ``sum_{n>k}`` exactly (or marks them
:data:`DIVERGENT`), and carries whatever structural metadata the rest of the
library needs: sign classes as symbolic sets, a Kakeya certificate for all
indices, exact subseries tails over symbolic sets, harmonic comparison
pieces for conditionally convergent families.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .numeric import DomainError, Interval, Q, fmt, geometric_tail, ln2_enclosure
from .sets import (EMPTY, EVEN, NAT, ODD, Complement, Finite, ParseError, Progression,
                   SymbolicSet, UndecidableShape, _parse_set, _Tokens, parse_set, union)


class ConvergenceClass(enum.Enum):
    ABSOLUTE = "AbsolutelyConvergent"
    CONDITIONAL = "ConditionallyConvergent"
    DIVERGENT_NULL = "DivergentPositiveNullTerms"

    def __str__(self):
        return self.value


class _Divergent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Divergent"

    __str__ = __repr__


DIVERGENT = _Divergent()


class ConstructionError(ValueError):
    """A generator's precondition failed."""


@dataclass(frozen=True)
class KakeyaPattern:
    """Certified comparison of |x_n| with r_n = sum_{k>n} |x_k| for all n >= start.

    kind: ``strict`` (|x_n| > r_n), ``equal`` (|x_n| = r_n), ``le`` (|x_n| <= r_n)
    or ``alternating`` (``le`` at odd n, ``strict`` at even n).
    """

    kind: str
    start: int = 1


@dataclass(frozen=True)
class HarmonicPiece:
    """Positions ``pos_first + (j-1) pos_step`` carrying ``num / (val_first + (j-1) val_step)``.

    Used by the rearrangement engine for one sign class of a series.
    """

    pos_first: int
    pos_step: int
    num: int
    val_first: int
    val_step: int

    def position(self, j: int) -> int:
        return self.pos_first + (j - 1) * self.pos_step

    def denominator(self, j: int) -> int:
        return self.val_first + (j - 1) * self.val_step

    def value(self, j: int) -> Fraction:
        return Fraction(self.num, self.denominator(j))


class Series:
    family: str = "abstract"
    convergence_class: ConvergenceClass = ConvergenceClass.ABSOLUTE

    def term(self, n: int) -> Fraction:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    # -- sums ---------------------------------------------------------------

    def terms(self, k: int) -> list[Fraction]:
        return [self.term(n) for n in range(1, k + 1)]

    def partial_sum(self, k: int) -> Fraction:
        return sum(self.terms(k), Fraction(0))

    def window_pos(self, k: int, K: int) -> Fraction:
        """sum_{n=k+1}^{K} x_n^+ (finite-window evidence for divergence)."""
        return sum((max(self.term(n), 0) for n in range(k + 1, K + 1)), Fraction(0))

    def window_neg(self, k: int, K: int) -> Fraction:
        return sum((max(-self.term(n), 0) for n in range(k + 1, K + 1)), Fraction(0))

    # exact totals of |x|, x^+, x^- for absolutely convergent families
    total_abs: Optional[Fraction] = None
    total_pos: Optional[Fraction] = None
    total_neg: Optional[Fraction] = None

    def tail_abs(self, k: int):
        if self.convergence_class is not ConvergenceClass.ABSOLUTE:
            return DIVERGENT
        return Interval.point(self.total_abs - sum((abs(x) for x in self.terms(k)), Fraction(0)))

    def tail_pos(self, k: int):
        if self.convergence_class is not ConvergenceClass.ABSOLUTE:
            return DIVERGENT
        return Interval.point(self.total_pos - sum((x for x in self.terms(k) if x > 0), Fraction(0)))

    def tail_neg(self, k: int):
        if self.convergence_class is not ConvergenceClass.ABSOLUTE:
            return DIVERGENT
        return Interval.point(self.total_neg + sum((x for x in self.terms(k) if x < 0), Fraction(0)))

    @property
    def total(self) -> Optional[Interval]:
        if self.convergence_class is ConvergenceClass.ABSOLUTE:
            return Interval.point(self.total_pos - self.total_neg)
        return None

    def total_at(self, bits: int) -> Optional[Interval]:
        """Enclosure of the sum of width at most 2**-bits (exact when rational)."""
        return self.total

    # -- structure ------------------------------------------------------------

    def sign_sets(self) -> Optional[tuple[SymbolicSet, SymbolicSet]]:
        """(positive-index set, negative-index set) when expressible."""
        return None

    def kakeya_pattern(self) -> Optional[KakeyaPattern]:
        return None

    def geometric_form(self) -> Optional[tuple[Fraction, Fraction, int]]:
        """(c, r, n0) with x_n = c r^n for every n >= n0."""
        return None

    def measure_limit(self):
        """Closed-form lim 2^k r_k: a Fraction, ``math.inf``, or None if unknown."""
        return None

    def abs_pieces(self) -> Optional[list[tuple[SymbolicSet, str, int]]]:
        """Partition of the index set into (piece, kind, sign) for comparison tests.

        kind ``harmonic``: c1/n <= |x_n| <= c2/n on the piece; kind ``summable``:
        sum of |x_n| over the piece is finite.
        """
        return None

    def harmonic_piece(self, sign: int) -> Optional[HarmonicPiece]:
        """The sign class as a single harmonic-like piece, if it is one."""
        return None

    def null_index(self, eps: Fraction) -> int:
        """N with x_n < eps for all n >= N (divergent null families)."""
        raise NotImplementedError

    def subset_tail(self, s: SymbolicSet, k: int) -> Interval:
        """Enclosure of sum_{n in s, n > k} x_n."""
        exact = self._structured_tail(s, k)
        if exact is not None:
            return Interval.point(exact)
        form = self.geometric_form()
        if form is not None and s.is_semilinear():
            return Interval.point(_geometric_subset_tail(self, form, s, k))
        if self.convergence_class is not ConvergenceClass.ABSOLUTE:
            raise DomainError("subseries tails need an absolutely convergent series")
        K = k + 64
        head = sum((self.term(n) for n in range(k + 1, K + 1) if s.member(n)), Fraction(0))
        return Interval(head - self.tail_neg(K).hi, head + self.tail_pos(K).hi)

    def _structured_tail(self, s: SymbolicSet, k: int) -> Optional[Fraction]:
        return None

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {"family": self.family, "params": self.params()}

    def __repr__(self):
        return f"{type(self).__name__}({json.dumps(self.params())})"


def same_set(a: SymbolicSet, b: SymbolicSet) -> bool:
    """Structural or (for semilinear sets) extensional equality."""
    if a == b:
        return True
    if a.is_semilinear() and b.is_semilinear():
        return (a - b).is_empty() and (b - a).is_empty()
    return False


def _geometric_subset_tail(series: Series, form, s: SymbolicSet, k: int) -> Fraction:
    c, r, n0 = form
    nf = s._normal
    start = k + 1
    total = Fraction(0)
    while start < n0:
        if s.member(start):
            total += series.term(start)
        start += 1
    top = max(start - 1, nf.t)
    for n in range(start, top + 1):
        if nf.member(n):
            total += c * r**n
    denom = 1 - r**nf.p
    for n in range(top + 1, top + nf.p + 1):
        if nf.member(n):
            total += c * r**n / denom
    return total


# ---------------------------------------------------------------------------
# absolutely convergent families
# ---------------------------------------------------------------------------


class Geometric(Series):
    def __init__(self, scale, ratio, family: str = "geometric"):
        self.scale, self.ratio = Q(scale), Q(ratio)
        if self.scale == 0:
            raise DomainError("scale must be non-zero")
        if not 0 < self.ratio < 1:
            raise DomainError(f"ratio must lie in (0, 1), got {self.ratio}")
        self.family = family
        s = self.scale
        self.total_abs = geometric_tail(self.ratio, abs(s), 0)
        self.total_pos = self.total_abs if s > 0 else Fraction(0)
        self.total_neg = self.total_abs if s < 0 else Fraction(0)

    def term(self, n):
        return self.scale * self.ratio**n

    def params(self):
        return {"scale": fmt(self.scale), "ratio": fmt(self.ratio)}

    def tail_abs(self, k):
        return Interval.point(geometric_tail(self.ratio, abs(self.scale), k))

    def tail_pos(self, k):
        return self.tail_abs(k) if self.scale > 0 else Interval.point(0)

    def tail_neg(self, k):
        return self.tail_abs(k) if self.scale < 0 else Interval.point(0)

    def sign_sets(self):
        return (NAT, EMPTY) if self.scale > 0 else (EMPTY, NAT)

    def geometric_form(self):
        return self.scale, self.ratio, 1

    def kakeya_pattern(self):
        # |x_n| / r_n = (1 - ratio) / ratio
        half = Fraction(1, 2)
        if self.ratio < half:
            return KakeyaPattern("strict")
        if self.ratio == half:
            return KakeyaPattern("equal")
        return KakeyaPattern("le")

    def measure_limit(self):
        if self.ratio < Fraction(1, 2):
            return Fraction(0)
        if self.ratio == Fraction(1, 2):
            return geometric_tail(self.ratio, abs(self.scale), 0)
        return math.inf

    def to_json(self):
        if self.family in ("dyadic", "cantor"):
            return {"family": self.family, "params": {}}
        return super().to_json()


def make_geometric(scale, ratio) -> Geometric:
    return Geometric(scale, ratio)


def make_dyadic() -> Geometric:
    return Geometric(1, Fraction(1, 2), "dyadic")


def make_cantor() -> Geometric:
    return Geometric(2, Fraction(1, 3), "cantor")


class MissingSingleton(Series):
    """Alternating signed terms on a gap sequence A, equal-share fillers in the gaps.

    x_{a_{2n-1}} = x/2^{n+1}, x_{a_{2n}} = -x/2^{n+1}; the a_i+1..a_{i+1}-1 gap
    shares x/2^{i+2} equally.  A(x_n) = [-x/2, x]; its maximum is reached only
    by the complement of {a_2, a_4, ...}.
    """

    family = "missing-singleton"

    def __init__(self, gaps: SymbolicSet, x, check_upto: int = 200):
        self.gaps, self.x = gaps, Q(x)
        if self.x <= 0:
            raise ConstructionError("x must be positive")
        try:
            if gaps.is_finite():
                raise ConstructionError("gap sequence must be infinite")
        except UndecidableShape:
            pass
        prev = 0
        for i in range(1, check_upto + 1):
            a = gaps.nth(i)
            if a <= prev + 1:
                raise ConstructionError(f"empty gap before a_{i} = {a}")
            prev = a
        self.total_pos = self.x
        self.total_neg = self.x / 2
        self.total_abs = self.x * Fraction(3, 2)

    def term(self, n):
        i = self.gaps.count(n)
        if self.gaps.member(n):
            m = (i + 1) // 2
            v = self.x / 2 ** (m + 1)
            return v if i % 2 else -v
        a_i = self.gaps.nth(i) if i else 0
        a_next = self.gaps.nth(i + 1)
        return self.x / (2 ** (i + 2) * (a_next - a_i - 1))

    def params(self):
        return {"gaps": self.gaps.to_expr(), "x": fmt(self.x)}

    def gap_block_sum(self, i: int) -> Fraction:
        a_i = self.gaps.nth(i) if i else 0
        a_next = self.gaps.nth(i + 1)
        return sum((self.term(n) for n in range(a_i + 1, a_next)), Fraction(0))

    @cached_property
    def even_gap_indices(self) -> Optional[SymbolicSet]:
        g = self.gaps
        if isinstance(g, Progression):
            return Progression(g.first + g.step, 2 * g.step)
        return None

    def sign_sets(self):
        neg = self.even_gap_indices
        if neg is None:
            return None
        return Complement(neg), neg

    def kakeya_pattern(self):
        return KakeyaPattern("le")

    def _structured_tail(self, s, k):
        if same_set(s, self.gaps):
            j = self.gaps.count(k)
            if j % 2 == 0:
                return Fraction(0)
            return -self.x / 2 ** ((j + 1) // 2 + 1)
        return None


def make_missing_singleton(gaps: SymbolicSet, x) -> MissingSingleton:
    return MissingSingleton(gaps, x)


def _require_partition(parts: Sequence[SymbolicSet], sample: int = 3000) -> None:
    for s in parts:
        try:
            if s.is_finite():
                raise ConstructionError(f"{s} must be infinite")
        except UndecidableShape:
            pass
    if all(s.is_semilinear() for s in parts):
        covered = union(*parts)
        if not Complement(covered).is_empty():
            raise ConstructionError("sets do not cover every positive integer")
        for i, a in enumerate(parts):
            for b in parts[i + 1:]:
                if not (a & b).is_empty():
                    raise ConstructionError(f"{a} and {b} overlap")
        return
    for n in range(1, sample + 1):
        if sum(s.member(n) for s in parts) != 1:
            raise ConstructionError(f"{n} is not in exactly one of the sets")


class OpenAI(Series):
    """x = +2^{-rank} on D and E, -2^{-rank} on B; A(x_n) = [-1, 2]."""

    family = "open-ai"

    def __init__(self, d: SymbolicSet, b: SymbolicSet, e: SymbolicSet):
        _require_partition([d, b, e])
        self.d, self.b, self.e = d, b, e
        self.total_pos, self.total_neg, self.total_abs = Fraction(2), Fraction(1), Fraction(3)

    def term(self, n):
        for s, sign in ((self.d, 1), (self.b, -1), (self.e, 1)):
            if s.member(n):
                return Fraction(sign, 2 ** s.count(n))
        raise AssertionError("partition violated")

    def params(self):
        return {"D": self.d.to_expr(), "B": self.b.to_expr(), "E": self.e.to_expr()}

    def sign_sets(self):
        return union(self.d, self.e), self.b

    def kakeya_pattern(self):
        return KakeyaPattern("le")

    def _structured_tail(self, s, k):
        for part, sign in ((self.d, 1), (self.b, -1), (self.e, 1)):
            if same_set(s, part):
                return Fraction(sign, 2 ** part.count(k))
        return None


def make_open_ai(d: SymbolicSet, b: SymbolicSet, e: SymbolicSet) -> OpenAI:
    return OpenAI(d, b, e)


class Supset(Series):
    """2^{-i} on the i-th element of C, 2/3^i on the i-th element of its complement."""

    family = "supset"

    def __init__(self, c: SymbolicSet):
        self.c, self.d = c, Complement(c)
        _require_partition([self.c, self.d])
        self.total_pos = self.total_abs = Fraction(2)
        self.total_neg = Fraction(0)

    def term(self, n):
        if self.c.member(n):
            return Fraction(1, 2 ** self.c.count(n))
        return Fraction(2, 3 ** self.d.count(n))

    def params(self):
        return {"C": self.c.to_expr()}

    def sign_sets(self):
        return NAT, EMPTY

    def _structured_tail(self, s, k):
        if same_set(s, self.c):
            return Fraction(1, 2 ** self.c.count(k))
        if same_set(s, self.d):
            return Fraction(1, 3 ** self.d.count(k))
        return None


def make_supset(c: SymbolicSet) -> Supset:
    return Supset(c)


class CantorPlusPoint(Series):
    """x_1 = 1, x_{n+1} = 2/3^n: the Cantor set and its translate by 1."""

    family = "cantor-plus-point"
    total_pos = total_abs = Fraction(2)
    total_neg = Fraction(0)

    def term(self, n):
        return Fraction(1) if n == 1 else Fraction(2, 3 ** (n - 1))

    def tail_abs(self, k):
        return Interval.point(2 if k == 0 else Fraction(1, 3 ** (k - 1)))

    tail_pos = tail_abs

    def tail_neg(self, k):
        return Interval.point(0)

    def sign_sets(self):
        return NAT, EMPTY

    def geometric_form(self):
        return Fraction(6), Fraction(1, 3), 2

    def kakeya_pattern(self):
        # x_1 = r_1 = 1, then 2/3^{n-1} > 3^{1-n}
        return KakeyaPattern("strict", 2)

    def measure_limit(self):
        return Fraction(0)


def make_cantor_plus_point() -> CantorPlusPoint:
    return CantorPlusPoint()


class Duplicated(Series):
    """x_{2n-1} = x_{2n} = y_n."""

    family = "duplicated-quick"

    def __init__(self, base: Series, require_quick: bool = True, check_upto: int = 40):
        if base.convergence_class is not ConvergenceClass.ABSOLUTE:
            raise ConstructionError("base must be absolutely convergent")
        for n in range(1, check_upto + 1):
            y = base.term(n)
            if y <= 0:
                raise ConstructionError("base terms must be positive")
            if require_quick and not y > 2 * base.tail_abs(n).hi:
                raise ConstructionError(f"y_{n} > 2 * sum_(k>{n}) y_k fails")
        self.base, self.require_quick = base, require_quick
        if not require_quick:
            self.family = "duplicated"
        self.total_pos = self.total_abs = 2 * base.total_abs
        self.total_neg = Fraction(0)

    def term(self, n):
        return self.base.term((n + 1) // 2)

    def tail_abs(self, k):
        j = (k + 1) // 2
        t = 2 * self.base.tail_abs(j).hi
        if k % 2:
            t += self.base.term(j)
        return Interval.point(t)

    tail_pos = tail_abs

    def tail_neg(self, k):
        return Interval.point(0)

    def params(self):
        return {"base": self.base.to_json()}

    def sign_sets(self):
        return NAT, EMPTY

    def kakeya_pattern(self):
        if not self.require_quick:
            return None
        return KakeyaPattern("alternating")

    def _structured_tail(self, s, k):
        if same_set(s, ODD) or same_set(s, EVEN):
            first = k + 1 if s.member(k + 1) else k + 2
            j = (first + 1) // 2
            return self.base.tail_abs(j - 1).hi
        return None


def make_duplicated_quick(base: Series) -> Duplicated:
    return Duplicated(base)


class CustomTable(Series):
    """Finitely many listed terms followed by zeros."""

    family = "custom-table"

    def __init__(self, values: Sequence):
        self.values = tuple(Q(v) for v in values)
        if not self.values:
            raise ConstructionError("table must be non-empty")
        self.total_pos = sum((v for v in self.values if v > 0), Fraction(0))
        self.total_neg = -sum((v for v in self.values if v < 0), Fraction(0))
        self.total_abs = self.total_pos + self.total_neg

    def term(self, n):
        return self.values[n - 1] if n <= len(self.values) else Fraction(0)

    def params(self):
        return {"values": [fmt(v) for v in self.values]}

    def sign_sets(self):
        pos = [i + 1 for i, v in enumerate(self.values) if v > 0]
        neg = [i + 1 for i, v in enumerate(self.values) if v < 0]
        return Finite(tuple(pos)), Finite(tuple(neg))


# ---------------------------------------------------------------------------
# divergent positive null families
# ---------------------------------------------------------------------------


class Harmonic(Series):
    family = "harmonic"
    convergence_class = ConvergenceClass.DIVERGENT_NULL

    def term(self, n):
        return Fraction(1, n)

    def null_index(self, eps):
        eps = Q(eps)
        return math.floor(1 / eps) + 1

    def harmonic_piece(self, sign):
        return HarmonicPiece(1, 1, 1, 1, 1) if sign > 0 else None

    def sign_sets(self):
        return NAT, EMPTY


def make_harmonic() -> Harmonic:
    return Harmonic()


class BlockHarmonic(Series):
    """1/2, 1/4, 1/3, 1/8, 1/7, 1/6, 1/5, 1/16, ...: reversed dyadic blocks.

    Block b occupies positions 2^{b-1} .. 2^b - 1 and lists 1/2^b down to
    1/(2^{b-1} + 1).
    """

    family = "block-harmonic"
    convergence_class = ConvergenceClass.DIVERGENT_NULL

    @staticmethod
    def block(n: int) -> int:
        return n.bit_length()

    def term(self, n):
        b = n.bit_length()
        return Fraction(1, 2**b - (n - 2 ** (b - 1)))

    def denominator(self, n: int) -> int:
        b = n.bit_length()
        return 2**b - (n - 2 ** (b - 1))

    def null_index(self, eps):
        # x_n <= 1/(2^{b-1}+1) < 2/(n+1)
        eps = Q(eps)
        return math.floor(2 / eps) + 1

    def sign_sets(self):
        return NAT, EMPTY


def make_block_harmonic() -> BlockHarmonic:
    return BlockHarmonic()


# ---------------------------------------------------------------------------
# conditionally convergent families
# ---------------------------------------------------------------------------


class SignedHarmonic(Series):
    """x_n = (-1)^n / n."""

    family = "signed-harmonic"
    convergence_class = ConvergenceClass.CONDITIONAL

    def term(self, n):
        return Fraction(-1 if n % 2 else 1, n)

    @property
    def total(self):
        return -ln2_enclosure()

    def total_at(self, bits):
        return -ln2_enclosure(bits)

    def sign_sets(self):
        return EVEN, ODD

    def abs_pieces(self):
        return [(EVEN, "harmonic", 1), (ODD, "harmonic", -1)]

    def harmonic_piece(self, sign):
        if sign > 0:
            return HarmonicPiece(2, 2, 1, 2, 2)
        return HarmonicPiece(1, 2, 1, 1, 2)


def make_signed_harmonic() -> SignedHarmonic:
    return SignedHarmonic()


class InterleavedConditional(Series):
    """x_{2n-1} = (-1)^n / n, x_{2n} = 1/2^n."""

    family = "interleaved-conditional"
    convergence_class = ConvergenceClass.CONDITIONAL

    def term(self, n):
        if n % 2 == 0:
            return Fraction(1, 2 ** (n // 2))
        m = (n + 1) // 2
        return Fraction(1 if m % 2 == 0 else -1, m)

    @property
    def total(self):
        return 1 - ln2_enclosure()

    def total_at(self, bits):
        return 1 - ln2_enclosure(bits)

    def sign_sets(self):
        return union(EVEN, Progression(3, 4)), Progression(1, 4)

    def abs_pieces(self):
        return [(Progression(3, 4), "harmonic", 1), (Progression(1, 4), "harmonic", -1),
                (EVEN, "summable", 1)]

    def harmonic_piece(self, sign):
        if sign < 0:
            return HarmonicPiece(1, 4, 1, 1, 2)
        return None


def make_interleaved_conditional() -> InterleavedConditional:
    return InterleavedConditional()


# ---------------------------------------------------------------------------
# interval subseries (greedy block packing)
# ---------------------------------------------------------------------------


class BudgetExhausted(RuntimeError):
    """The block scan ran past its index budget."""


@dataclass
class SubseriesBlocks:
    blocks: list[list[int]]
    sums: list[Fraction]
    width: Fraction

    def bounds(self, n: int) -> tuple[Fraction, Fraction]:
        """Admissible (lower, upper) range for the n-th block sum (1-based)."""
        prev = self.width if n == 1 else self.sums[n - 2]
        return prev / 2**n, 3 * self.width / 2 ** (n + 1)


def extract_interval_subseries(s: Series, a, b, depth: int,
                               budget: int = 10**6) -> SubseriesBlocks:
    """Blocks F_1 < F_2 < ... of positive-term indices with sums
    y_{n-1}/2^n <= y_n <= 3x/2^{n+1}, x = b - a, found by first-fit scanning."""
    a, b = Q(a), Q(b)
    if s.convergence_class is not ConvergenceClass.CONDITIONAL:
        raise DomainError("interval subseries needs a conditionally convergent series")
    if not a < b:
        raise DomainError("need a < b")
    x = b - a
    out = SubseriesBlocks([], [], x)
    n = 0
    for level in range(1, depth + 1):
        lower, upper = out.bounds(level)
        block, acc = [], Fraction(0)
        while acc < lower:
            n += 1
            if n > budget:
                raise BudgetExhausted(f"scanned {budget} indices while packing block {level}")
            t = s.term(n)
            if t > 0 and acc + t <= upper:
                block.append(n)
                acc += t
        out.blocks.append(block)
        out.sums.append(acc)
    return out


# ---------------------------------------------------------------------------
# spec strings: JSON {family, params} or prefix expressions
# ---------------------------------------------------------------------------


def series_from_json(obj: dict) -> Series:
    fam = obj.get("family")
    p = obj.get("params", {}) or {}
    try:
        if fam == "geometric":
            return make_geometric(p["scale"], p["ratio"])
        if fam == "dyadic":
            return make_dyadic()
        if fam == "cantor":
            return make_cantor()
        if fam == "harmonic":
            return make_harmonic()
        if fam == "block-harmonic":
            return make_block_harmonic()
        if fam == "signed-harmonic":
            return make_signed_harmonic()
        if fam == "interleaved-conditional":
            return make_interleaved_conditional()
        if fam == "missing-singleton":
            return make_missing_singleton(parse_set(p["gaps"]), p["x"])
        if fam == "open-ai":
            return make_open_ai(parse_set(p["D"]), parse_set(p["B"]), parse_set(p["E"]))
        if fam == "supset":
            return make_supset(parse_set(p["C"]))
        if fam == "cantor-plus-point":
            return make_cantor_plus_point()
        if fam in ("duplicated-quick", "duplicated"):
            return Duplicated(series_from_json(p["base"]), require_quick=fam == "duplicated-quick")
        if fam == "custom-table":
            return CustomTable(p["values"])
    except KeyError as e:
        raise ParseError(f"family {fam!r} is missing parameter {e}") from None
    raise ParseError(f"unknown series family {fam!r}")


_NULLARY = {"dyadic": make_dyadic, "cantor": make_cantor, "harmonic": make_harmonic,
            "block-harmonic": make_block_harmonic, "signed-harmonic": make_signed_harmonic,
            "interleaved": make_interleaved_conditional,
            "interleaved-conditional": make_interleaved_conditional,
            "cantor-plus-point": make_cantor_plus_point}


def _rational_token(tk: _Tokens, rule: str) -> Fraction:
    tok = tk.next(rule)
    try:
        return Q(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a rational p/q but found {tok!r} in rule <{rule}>") from None


def _parse_series(tk: _Tokens) -> Series:
    tok = tk.next("series")
    if tok in _NULLARY:
        return _NULLARY[tok]()
    if tok != "(":
        raise ParseError(f"unexpected token {tok!r} in rule <series>")
    head = tk.next("series")
    if head in _NULLARY:
        tk.expect(")", head)
        return _NULLARY[head]()
    if head in ("geom", "geometric"):
        scale, ratio = _rational_token(tk, "geom"), _rational_token(tk, "geom")
        tk.expect(")", "geom")
        return make_geometric(scale, ratio)
    if head == "missing-singleton":
        gaps = _parse_set(tk)
        x = _rational_token(tk, "missing-singleton")
        tk.expect(")", head)
        return make_missing_singleton(gaps, x)
    if head == "open-ai":
        d, b, e = _parse_set(tk), _parse_set(tk), _parse_set(tk)
        tk.expect(")", head)
        return make_open_ai(d, b, e)
    if head == "supset":
        c = _parse_set(tk)
        tk.expect(")", head)
        return make_supset(c)
    if head in ("duplicated", "duplicated-quick"):
        base = _parse_series(tk)
        tk.expect(")", head)
        return Duplicated(base, require_quick=head == "duplicated-quick")
    if head == "table":
        vals = []
        while tk.peek() != ")":
            vals.append(_rational_token(tk, "table"))
        tk.expect(")", "table")
        return CustomTable(vals)
    raise ParseError(f"unknown series constructor {head!r} in rule <series>")


def parse_series(text: str) -> Series:
    """Parse ``(geom 1 1/2)``-style prefix specs or a JSON ``{family, params}`` object."""
    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON series spec: {e}") from None
        return series_from_json(obj)
    tk = _Tokens(text)
    s = _parse_series(tk)
    tk.done()
    return s
