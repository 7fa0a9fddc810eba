"""Decidable symbolic subsets of the positive integers.

Sets are immutable expression trees over explicit finite sets, arithmetic
progressions and *registered* sparse sequences (squares, powers of two,
user-registered monotone sequences), closed under union, intersection,
complement and finite symmetric difference.

Registered-free trees are eventually periodic, so membership, counting,
finiteness and natural density are exact.  Trees with registered atoms are
decided by splitting on the atoms: with every atom of density zero,
``S`` differs from the tree with all atoms replaced by the empty set only on
a density-zero set, and a single atom against a periodic set is settled by
the residues the atom hits infinitely often.  Shapes outside these cases
raise :class:`UndecidableShape` instead of guessing.
"""

from __future__ import annotations

import itertools
import math
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterator, Optional, Sequence

__all__ = [
    "SymbolicSet", "Finite", "Progression", "Registered", "Union", "Intersection",
    "Complement", "SymDiffFinite", "UndecidableShape", "ParseError",
    "register_sequence", "parse_set", "NAT", "EVEN", "ODD", "EMPTY", "SQUARES",
    "POWERS_OF_TWO", "member", "is_finite", "natural_density", "enumerate_set",
    "union", "intersection", "tokenize",
]

MAX_PERIOD_WINDOW = 5_000_000


class UndecidableShape(ValueError):
    """The expression lies outside the fragment where the question is decided."""


class ParseError(ValueError):
    """A prefix expression failed to parse; names the token and grammar rule."""


# ---------------------------------------------------------------------------
# registered sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceInfo:
    name: str
    nth: Callable[[int], int]
    count: Callable[[int], int]
    density: Optional[Fraction]
    harmonic_bound: Optional[Fraction]  # upper bound on sum_{n in R} 1/n, None if unknown
    residues: Optional[Callable[[int], tuple[frozenset, int]]] = None

    def member(self, n: int) -> bool:
        return n >= 1 and self.count(n) - self.count(n - 1) == 1

    def upto(self, n: int) -> Iterator[int]:
        j = 1
        while True:
            v = self.nth(j)
            if v > n:
                return
            yield v
            j += 1


def _square_residues(p: int) -> tuple[frozenset, int]:
    return frozenset(m * m % p for m in range(p)), 0


def _pow2_residues(p: int) -> tuple[frozenset, int]:
    seen: dict[int, int] = {}
    order = []
    v, j = 1 % p, 0
    while v not in seen:
        seen[v] = j
        order.append(v)
        v, j = v * 2 % p, j + 1
    start = seen[v]
    return frozenset(order[start:]), 2 ** start


_REGISTRY: dict[str, SequenceInfo] = {
    "squares": SequenceInfo(
        "squares", lambda j: j * j, lambda n: math.isqrt(n) if n > 0 else 0,
        Fraction(0), Fraction(2), _square_residues),
    "powers-of-two": SequenceInfo(
        "powers-of-two", lambda j: 2 ** (j - 1), lambda n: n.bit_length() if n > 0 else 0,
        Fraction(0), Fraction(2), _pow2_residues),
}


def _count_from_nth(nth: Callable[[int], int]) -> Callable[[int], int]:
    def count(n: int) -> int:
        if n < 1 or nth(1) > n:
            return 0
        lo, hi = 1, 2
        while nth(hi) <= n:
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if nth(mid) <= n:
                lo = mid
            else:
                hi = mid
        return lo
    return count


def register_sequence(name: str, nth: Callable[[int], int], *,
                      density: Optional[Fraction] = Fraction(0),
                      harmonic_bound: Optional[Fraction] = None,
                      verify_upto: int = 10**6) -> "Registered":
    """Register a strictly increasing closed-form sequence ``nth(1) < nth(2) < ...``.

    The declared metadata is trusted only after spot checks: ``nth`` must be
    strictly increasing over every index whose value stays below
    ``verify_upto``, and a declared zero density must be consistent with the
    counts observed there.
    """
    if name in _REGISTRY:
        raise ValueError(f"sequence {name!r} already registered")
    prev, j = 0, 1
    while True:
        v = nth(j)
        if not isinstance(v, int) or v <= prev:
            raise ValueError(f"{name}: nth must be strictly increasing positive ints (index {j})")
        if v > verify_upto:
            break
        prev, j = v, j + 1
    if density == 0 and j > 1 and (j - 1) * 4 > prev and prev > 1000:
        raise ValueError(f"{name}: declared density 0 but {j - 1} elements below {prev}")
    _REGISTRY[name] = SequenceInfo(name, nth, _count_from_nth(nth),
                                   None if density is None else Fraction(density),
                                   None if harmonic_bound is None else Fraction(harmonic_bound))
    return Registered(name)


# ---------------------------------------------------------------------------
# expression nodes
# ---------------------------------------------------------------------------


class SymbolicSet:
    """Base class of all set expressions."""

    # -- structure ----------------------------------------------------------

    def children(self) -> tuple["SymbolicSet", ...]:
        return ()

    @cached_property
    def atoms(self) -> frozenset[str]:
        out: set[str] = set()
        for c in self.children():
            out |= c.atoms
        return frozenset(out)

    def _eval(self, n: int, assign: Optional[dict] = None) -> bool:
        raise NotImplementedError

    def substitute(self, assign: dict) -> "SymbolicSet":
        """Replace registered atoms by NAT (True) or EMPTY (False)."""
        raise NotImplementedError

    def _shape(self) -> tuple[int, int]:
        """(threshold t, period p) with membership p-periodic above t."""
        raise NotImplementedError

    @cached_property
    def _normal(self) -> "_Periodic":
        if self.atoms:
            raise UndecidableShape("normal form requires a registered-free expression")
        t, p = self._shape()
        if t + p > MAX_PERIOD_WINDOW:
            raise UndecidableShape(f"eventual period window {t + p} exceeds cap")
        return _Periodic.build(self, t, p)

    # -- public queries -------------------------------------------------------

    def __contains__(self, n: int) -> bool:
        return self.member(n)

    def member(self, n: int) -> bool:
        if n < 1:
            return False
        if not self.atoms:
            return self._normal.member(n)
        return self._eval(n)

    def count(self, n: int) -> int:
        """|S ∩ {1..n}|."""
        if n < 1:
            return 0
        if not self.atoms:
            return self._normal.count(n)
        base = self.substitute({a: False for a in self.atoms})
        total = base.count(n)
        extra = set()
        for a in self.atoms:
            extra.update(_REGISTRY[a].upto(n))
        for r in extra:
            total += int(self._eval(r)) - int(base.member(r))
        return total

    def enumerate(self, k: int) -> list[int]:
        """Sorted S ∩ {1..k}."""
        if not self.atoms:
            return self._normal.enumerate(k)
        return [n for n in range(1, k + 1) if self._eval(n)]

    def nth(self, j: int) -> int:
        """The j-th smallest element (1-based)."""
        if j < 1:
            raise ValueError("rank must be positive")
        if self.count(1) >= j:
            return 1
        lo, hi = 1, 2
        while self.count(hi) < j:
            lo, hi = hi, hi * 2
            if hi > 2**80:
                raise ValueError(f"set has fewer than {j} elements")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.count(mid) >= j:
                hi = mid
            else:
                lo = mid
        return hi

    def rank(self, n: int) -> int:
        """Position of ``n`` within the set (1-based); ``n`` must be a member."""
        if not self.member(n):
            raise ValueError(f"{n} is not a member of {self}")
        return self.count(n)

    def is_finite(self) -> bool:
        if not self.atoms:
            return self._normal.eventually_empty
        _require_null_atoms(self)
        atoms = sorted(self.atoms)
        zero = {a: False for a in atoms}
        if not self.substitute(zero)._normal.eventually_empty:
            return False
        infinite_cells = []
        for bits in itertools.product([False, True], repeat=len(atoms)):
            if not any(bits):
                continue
            q = self.substitute(dict(zip(atoms, bits)))
            if not q._normal.eventually_empty:
                infinite_cells.append((bits, q))
        if not infinite_cells:
            return True
        if len(atoms) == 1:
            (_, q), = infinite_cells
            info = _REGISTRY[atoms[0]]
            if info.residues is None:
                raise UndecidableShape(f"no residue data for registered set {atoms[0]!r}")
            hit, _ = info.residues(q._normal.p)
            return not (hit & q._normal.eventual_residues)
        raise UndecidableShape(
            f"finiteness of {self} needs intersections of distinct registered sets")

    def is_empty(self) -> bool:
        if not self.atoms:
            return self._normal.count(self._normal.t + self._normal.p) == 0
        if not self.is_finite():
            return False
        return not any(self._eval(n) for n in range(1, self._finite_bound() + 1))

    def _finite_bound(self) -> int:
        atoms = sorted(self.atoms)
        bound = 0
        for bits in itertools.product([False, True], repeat=len(atoms)):
            nf = self.substitute(dict(zip(atoms, bits)))._normal
            bound = max(bound, nf.t + nf.p)
            if any(bits) and len(atoms) == 1 and _REGISTRY[atoms[0]].residues:
                bound = max(bound, _REGISTRY[atoms[0]].residues(nf.p)[1])
        return bound

    def density(self) -> Optional[Fraction]:
        """Exact natural density, or None when it is not determined."""
        if not self.atoms:
            return self._normal.density
        if isinstance(self, Registered):
            return _REGISTRY[self.name].density
        if any(_REGISTRY[a].density != 0 for a in self.atoms):
            return None
        return self.substitute({a: False for a in self.atoms})._normal.density

    def density_part(self) -> "SymbolicSet":
        """The registered-free set agreeing with ``self`` off the registered atoms."""
        return self.substitute({a: False for a in self.atoms})

    def harmonic_bound_of_atoms(self) -> Optional[Fraction]:
        total = Fraction(0)
        for a in self.atoms:
            b = _REGISTRY[a].harmonic_bound
            if b is None:
                return None
            total += b
        return total

    def is_semilinear(self) -> bool:
        return not self.atoms

    # -- printing -------------------------------------------------------------

    def to_expr(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_expr()

    # operators for convenience
    def __or__(self, other: "SymbolicSet") -> "SymbolicSet":
        return Union(self, other)

    def __and__(self, other: "SymbolicSet") -> "SymbolicSet":
        return Intersection(self, other)

    def __invert__(self) -> "SymbolicSet":
        return Complement(self)

    def __sub__(self, other: "SymbolicSet") -> "SymbolicSet":
        return Intersection(self, Complement(other))


def _require_null_atoms(s: SymbolicSet) -> None:
    for a in s.atoms:
        if _REGISTRY[a].density != 0:
            raise UndecidableShape(f"registered set {a!r} is not declared density-zero")


@dataclass(frozen=True)
class _Periodic:
    t: int
    p: int
    prefix: tuple  # prefix[i] = |S ∩ {1..i}| for i <= t + p

    @classmethod
    def build(cls, s: SymbolicSet, t: int, p: int) -> "_Periodic":
        acc = [0]
        for n in range(1, t + p + 1):
            acc.append(acc[-1] + int(s._eval(n)))
        return cls(t, p, tuple(acc))

    def member(self, n: int) -> bool:
        if n > self.t + self.p:
            n = self.t + (n - self.t - 1) % self.p + 1
        return self.prefix[n] - self.prefix[n - 1] == 1

    def count(self, n: int) -> int:
        w = self.t + self.p
        if n <= w:
            return self.prefix[n]
        per = self.prefix[w] - self.prefix[self.t]
        q, r = divmod(n - self.t, self.p)
        return self.prefix[self.t] + q * per + self.prefix[self.t + r] - self.prefix[self.t]

    def enumerate(self, k: int) -> list[int]:
        return [n for n in range(1, k + 1) if self.member(n)]

    @property
    def period_count(self) -> int:
        return self.prefix[self.t + self.p] - self.prefix[self.t]

    @property
    def eventually_empty(self) -> bool:
        return self.period_count == 0

    @property
    def density(self) -> Fraction:
        return Fraction(self.period_count, self.p)

    @property
    def eventual_residues(self) -> frozenset:
        return frozenset(n % self.p for n in range(self.t + 1, self.t + self.p + 1)
                         if self.member(n))


@dataclass(frozen=True)
class Finite(SymbolicSet):
    elements: tuple = ()

    def __post_init__(self):
        els = tuple(sorted(set(int(e) for e in self.elements)))
        if els and els[0] < 1:
            raise ValueError("finite sets hold positive integers")
        object.__setattr__(self, "elements", els)

    def _eval(self, n, assign=None):
        i = bisect_right(self.elements, n)
        return i > 0 and self.elements[i - 1] == n

    def substitute(self, assign):
        return self

    def _shape(self):
        return (self.elements[-1] if self.elements else 0), 1

    def to_expr(self):
        return "(fin" + "".join(f" {e}" for e in self.elements) + ")"


@dataclass(frozen=True)
class Progression(SymbolicSet):
    first: int
    step: int

    def __post_init__(self):
        if self.first < 1 or self.step < 1:
            raise ValueError("progression needs first >= 1 and step >= 1")

    def _eval(self, n, assign=None):
        return n >= self.first and (n - self.first) % self.step == 0

    def substitute(self, assign):
        return self

    def _shape(self):
        return self.first - 1, self.step

    def nth(self, j):
        if j < 1:
            raise ValueError("rank must be positive")
        return self.first + (j - 1) * self.step

    def to_expr(self):
        return f"(prog {self.first} {self.step})"


@dataclass(frozen=True)
class Registered(SymbolicSet):
    name: str

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ValueError(f"unknown registered sequence {self.name!r}")

    @cached_property
    def atoms(self):
        return frozenset([self.name])

    @property
    def info(self) -> SequenceInfo:
        return _REGISTRY[self.name]

    def _eval(self, n, assign=None):
        if assign is not None and self.name in assign:
            return assign[self.name]
        return self.info.member(n)

    def substitute(self, assign):
        return NAT if assign[self.name] else EMPTY

    def member(self, n):
        return self.info.member(n)

    def count(self, n):
        return self.info.count(n) if n >= 1 else 0

    def nth(self, j):
        return self.info.nth(j)

    def is_finite(self):
        return False

    def to_expr(self):
        if self.name == "squares":
            return "(squares)"
        if self.name == "powers-of-two":
            return "(pow2)"
        return f"(reg {self.name})"


@dataclass(frozen=True)
class Union(SymbolicSet):
    left: SymbolicSet
    right: SymbolicSet

    def children(self):
        return (self.left, self.right)

    def _eval(self, n, assign=None):
        return self.left._eval(n, assign) or self.right._eval(n, assign)

    def substitute(self, assign):
        return Union(self.left.substitute(assign), self.right.substitute(assign))

    def _shape(self):
        (t1, p1), (t2, p2) = self.left._shape(), self.right._shape()
        return max(t1, t2), math.lcm(p1, p2)

    def to_expr(self):
        return f"(union {self.left.to_expr()} {self.right.to_expr()})"


@dataclass(frozen=True)
class Intersection(SymbolicSet):
    left: SymbolicSet
    right: SymbolicSet

    def children(self):
        return (self.left, self.right)

    def _eval(self, n, assign=None):
        return self.left._eval(n, assign) and self.right._eval(n, assign)

    def substitute(self, assign):
        return Intersection(self.left.substitute(assign), self.right.substitute(assign))

    def _shape(self):
        (t1, p1), (t2, p2) = self.left._shape(), self.right._shape()
        return max(t1, t2), math.lcm(p1, p2)

    def to_expr(self):
        return f"(inter {self.left.to_expr()} {self.right.to_expr()})"


@dataclass(frozen=True)
class Complement(SymbolicSet):
    inner: SymbolicSet

    def children(self):
        return (self.inner,)

    def _eval(self, n, assign=None):
        return not self.inner._eval(n, assign)

    def substitute(self, assign):
        return Complement(self.inner.substitute(assign))

    def _shape(self):
        return self.inner._shape()

    def to_expr(self):
        return f"(comp {self.inner.to_expr()})"


@dataclass(frozen=True)
class SymDiffFinite(SymbolicSet):
    inner: SymbolicSet
    elements: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(set(int(e) for e in self.elements))))

    def children(self):
        return (self.inner,)

    def _eval(self, n, assign=None):
        return self.inner._eval(n, assign) != (n in self.elements)

    def substitute(self, assign):
        return SymDiffFinite(self.inner.substitute(assign), self.elements)

    def _shape(self):
        t, p = self.inner._shape()
        return max(t, self.elements[-1] if self.elements else 0), p

    def to_expr(self):
        return f"(symdiff {self.inner.to_expr()}" + "".join(f" {e}" for e in self.elements) + ")"


NAT = Progression(1, 1)
EVEN = Progression(2, 2)
ODD = Progression(1, 2)
EMPTY = Finite(())
SQUARES = Registered("squares")
POWERS_OF_TWO = Registered("powers-of-two")


def union(*sets: SymbolicSet) -> SymbolicSet:
    if not sets:
        return EMPTY
    out = sets[0]
    for s in sets[1:]:
        out = Union(out, s)
    return out


def intersection(*sets: SymbolicSet) -> SymbolicSet:
    if not sets:
        return NAT
    out = sets[0]
    for s in sets[1:]:
        out = Intersection(out, s)
    return out


# functional aliases matching the operation names
def member(s: SymbolicSet, n: int) -> bool:
    return s.member(n)


def is_finite(s: SymbolicSet) -> bool:
    return s.is_finite()


def natural_density(s: SymbolicSet) -> Optional[Fraction]:
    return s.density()


def enumerate_set(s: SymbolicSet, k: int) -> list[int]:
    return s.enumerate(k)


# ---------------------------------------------------------------------------
# prefix grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, rule: str) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in rule <{rule}>: {self.text!r}")
        self.i += 1
        return tok

    def expect(self, want: str, rule: str) -> None:
        tok = self.next(rule)
        if tok != want:
            raise ParseError(f"expected {want!r} but found {tok!r} in rule <{rule}>")

    def int_(self, rule: str) -> int:
        tok = self.next(rule)
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected an integer but found {tok!r} in rule <{rule}>") from None

    def ints_until_close(self, rule: str) -> list[int]:
        out = []
        while self.peek() != ")":
            out.append(self.int_(rule))
        self.expect(")", rule)
        return out

    def done(self) -> None:
        if self.peek() is not None:
            raise ParseError(f"trailing token {self.peek()!r} after complete expression")


_BARE = {"nat": lambda: NAT, "even": lambda: EVEN, "odd": lambda: ODD,
         "empty": lambda: EMPTY, "squares": lambda: SQUARES, "pow2": lambda: POWERS_OF_TWO}


def _parse_set(tk: _Tokens) -> SymbolicSet:
    tok = tk.next("set")
    if tok in _BARE:
        return _BARE[tok]()
    if tok != "(":
        raise ParseError(f"unexpected token {tok!r} in rule <set>")
    head = tk.next("set")
    if head in _BARE:
        tk.expect(")", head)
        return _BARE[head]()
    if head == "fin":
        return Finite(tuple(tk.ints_until_close("fin")))
    if head == "prog":
        a, d = tk.int_("prog"), tk.int_("prog")
        tk.expect(")", "prog")
        try:
            return Progression(a, d)
        except ValueError as e:
            raise ParseError(f"{e} in rule <prog>") from None
    if head == "reg":
        name = tk.next("reg")
        tk.expect(")", "reg")
        try:
            return Registered(name)
        except ValueError as e:
            raise ParseError(f"{e} in rule <reg>") from None
    if head in ("union", "inter"):
        parts = [_parse_set(tk)]
        while tk.peek() != ")":
            parts.append(_parse_set(tk))
        tk.expect(")", head)
        if len(parts) < 2:
            raise ParseError(f"rule <{head}> needs at least two operands")
        return union(*parts) if head == "union" else intersection(*parts)
    if head == "comp":
        inner = _parse_set(tk)
        tk.expect(")", "comp")
        return Complement(inner)
    if head == "symdiff":
        inner = _parse_set(tk)
        return SymDiffFinite(inner, tuple(tk.ints_until_close("symdiff")))
    raise ParseError(f"unknown set constructor {head!r} in rule <set>")


def parse_set(text: str) -> SymbolicSet:
    """Parse a prefix expression such as ``(union (prog 3 3) (fin 1 2))``."""
    tk = _Tokens(text)
    s = _parse_set(tk)
    tk.done()
    return s
