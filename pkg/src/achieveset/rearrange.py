"""Rearrangements with prescribed difference sums, Riemann targeting and SR_I classes.

The difference engine builds a permutation sigma of a positive null sequence
z with sum_n (z_n - z_sigma(n)) = x.  It starts with a block that overshoots
and pulls back by z_1.  After that, each step either takes the largest
unused term (while the running difference is at least x) or the first unused
term small enough not to overshoot again.

Running differences are kept as fixed-point enclosures (``bits`` fractional
bits).  A comparison that the enclosure cannot decide is redone in exact
rationals, or at higher precision when the target is irrational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

from .ideals import (IN, WEIGHTS, FinIdeal, GeneratedIdeal, Ideal, IntersectionIdeal,
                     SummableIdeal, ideal_generators)
from .numeric import DomainError, Interval, Q, Refusal, fmt
from .series import BlockHarmonic, ConvergenceClass, HarmonicPiece, Series
from .sets import Progression, SymbolicSet

MAX_BITS = 1 << 14


class _Ambiguous(Exception):
    pass


class _FreeList:
    """Least unused positive integer >= p, with path compression."""

    def __init__(self):
        self._next: dict[int, int] = {}

    def next(self, p: int) -> int:
        path = []
        while p in self._next:
            path.append(p)
            p = self._next[p]
        for q in path:
            self._next[q] = p
        return p

    def take(self, p: int) -> None:
        self._next[p] = p + 1

    def __contains__(self, p: int) -> bool:
        return p in self._next


# ---------------------------------------------------------------------------
# positive null sequences with usage tracking
# ---------------------------------------------------------------------------


class PositiveNull:
    """A positive sequence z_1, z_2, ... tending to 0 with a divergent sum."""

    monotone: bool = False

    def __init__(self):
        self.free = _FreeList()

    def denominator(self, j: int) -> int:
        raise NotImplementedError

    numerator: int = 1

    def value(self, j: int) -> Fraction:
        return Fraction(self.numerator, self.denominator(j))

    def scaled(self, j: int, bits: int) -> tuple[int, int]:
        n, d = self.numerator << bits, self.denominator(j)
        return n // d, -(-n // d)

    def null_index(self, theta: Fraction) -> int:
        """N with z_p < theta for every p >= N."""
        raise NotImplementedError

    def max_unused(self) -> int:
        raise NotImplementedError

    def least_unused_below(self, theta: Fraction) -> int:
        """Least unused index j with z_j < theta."""
        raise NotImplementedError

    def use(self, j: int) -> None:
        self.free.take(j)

    def fresh(self) -> "PositiveNull":
        raise NotImplementedError


class HarmonicNull(PositiveNull):
    """z_j = num / (val_first + (j-1) val_step)."""

    monotone = True

    def __init__(self, piece: HarmonicPiece):
        super().__init__()
        self.piece = piece
        self.numerator = piece.num

    def denominator(self, j):
        return self.piece.denominator(j)

    def first_below(self, theta: Fraction) -> int:
        p = self.piece
        if theta <= 0:
            raise DomainError("threshold must be positive")
        # least j with val_first + (j-1) val_step > num / theta
        j = max(1, math.floor((p.num / theta - p.val_first) / p.val_step) + 1)
        while not self.value(j) < theta:
            j += 1
        return j

    def null_index(self, theta):
        return self.first_below(theta)

    def max_unused(self):
        return self.free.next(1)

    def least_unused_below(self, theta):
        return self.free.next(self.first_below(theta))

    def fresh(self):
        return HarmonicNull(self.piece)


class BlockNull(PositiveNull):
    """1/2, 1/4, 1/3, 1/8, 1/7, 1/6, 1/5, ...: block b lists 1/2^b down to 1/(2^{b-1}+1)."""

    def __init__(self):
        super().__init__()
        self.free_den = _FreeList()

    def denominator(self, j):
        b = j.bit_length()
        return 2**b - (j - 2 ** (b - 1))

    @staticmethod
    def position(d: int) -> int:
        b = (d - 1).bit_length()
        return 2 ** (b - 1) + 2**b - d

    def null_index(self, theta):
        b = 1
        while not Fraction(1, 2 ** (b - 1) + 1) < theta:
            b += 1
        return 2 ** (b - 1)

    def max_unused(self):
        return self.position(self.free_den.next(2))

    def least_unused_below(self, theta):
        dmin = math.floor(1 / theta) + 1
        if dmin <= 2:
            return self.free.next(1)
        b0 = (dmin - 1).bit_length()
        start = 2 ** (b0 - 1)
        p = self.free.next(start)
        if p <= start + 2**b0 - dmin:
            return p
        return self.free.next(2**b0)

    def use(self, j):
        self.free.take(j)
        self.free_den.take(self.denominator(j))

    def fresh(self):
        return BlockNull()


def positive_null(s: Series, sign: int = 1) -> PositiveNull:
    """The sign class of ``s`` as a :class:`PositiveNull`, if the family supports it."""
    if isinstance(s, BlockHarmonic):
        if sign < 0:
            raise DomainError("block-harmonic has no negative terms")
        return BlockNull()
    piece = s.harmonic_piece(sign)
    if piece is None:
        raise Refusal(f"{s.family}: sign class {sign:+d} is not a certified harmonic-like sequence")
    return HarmonicNull(piece)


# ---------------------------------------------------------------------------
# the difference engine
# ---------------------------------------------------------------------------


TargetLike = Union[Fraction, int, str, Callable[[int], Interval]]


def _target_provider(x: TargetLike):
    if callable(x):
        return x, None
    x = Q(x)
    return (lambda bits: Interval.point(x)), x


class DifferenceStream:
    """sigma on the indices of ``null`` with sum (z_n - z_sigma(n)) = target.

    ``target`` is a rational or a callable ``bits -> Interval`` enclosing an
    irrational target to within 2**-bits.
    """

    def __init__(self, null: PositiveNull, target: TargetLike, bits: int = 256):
        self.null = null
        self._target_at, self.exact_target = _target_provider(target)
        self.bits = bits
        probe = self._target_at(bits)
        if probe.hi < 0:
            raise DomainError("target must be >= 0")
        if probe.lo < 0:
            raise DomainError("target enclosure straddles 0; supply a certified sign")
        self.sigma: list[int] = []
        self.cases: list[int] = []      # 0 initial block / identity, 1 and 2 as in the construction
        self.crossings: list[int] = []  # N at which D_N crossed the target
        self.envelope_violations: list[int] = []
        self.exact_steps = 0
        self._env: list[tuple[int, Fraction]] = []  # (from N, bound)
        self._d: list[tuple[int, int, int]] = []   # (lo, hi, bits) for D_N
        self._dist: list[tuple[int, int]] = []     # (ceil |D_N - x| * 2^bits, bits)
        self._setup()

    # -- arithmetic helpers ------------------------------------------------------

    def _x(self, bits):
        iv = self._target_at(bits)
        one = 1 << bits
        return (iv.lo.numerator * one) // iv.lo.denominator, -(-(iv.hi.numerator * one) // iv.hi.denominator)

    def _z(self, j, bits):
        return self.null.scaled(j, bits)

    def _d_now(self, bits):
        """Re-derive D_N at ``bits`` from the permutation so far."""
        n = len(self.sigma)
        lo = hi = 0
        for i in range(1, n + 1):
            a, b = self._z(i, bits)
            c, d = self._z(self.sigma[i - 1], bits)
            lo += a - d
            hi += b - c
        return lo, hi

    def exact_difference(self, N: Optional[int] = None) -> Fraction:
        """D_N in exact rationals (sums only over the symmetric difference of index sets)."""
        N = len(self.sigma) if N is None else N
        image = set(self.sigma[:N])
        head = [j for j in range(1, N + 1) if j not in image]
        extra = [j for j in image if j > N]
        return sum((self.null.value(j) for j in head), Fraction(0)) - \
            sum((self.null.value(j) for j in extra), Fraction(0))

    # -- construction -------------------------------------------------------------

    def _setup(self):
        probe = self._target_at(self.bits)
        if self.exact_target == 0:
            self.identity = True
            return
        self.identity = False
        if probe.lo == 0:
            raise DomainError("target enclosure touches 0; supply a sharper enclosure")
        z = self.null
        # k1 >= 2: sum_{n<k1} z_n <= x + z_1 < sum_{n<=k1} z_n
        x1 = z.value(1)
        acc, k = x1, 1
        while True:
            k += 1
            acc += z.value(k)
            if self._gt_target_plus(acc, x1):
                break
        self.k1 = k1 = k
        theta = z.value(k1) / (k1 - 1)
        self.m = m = max(z.null_index(theta) - 1, 1)
        for n in range(1, k1):
            self._emit(m + n, 0)
        self._emit(1, 0)
        self._env.append((k1, z.value(k1)))
        self._check_envelope(k1)

    def _gt_target_plus(self, acc: Fraction, shift: Fraction) -> bool:
        bits = 128
        while True:
            iv = self._target_at(bits) + shift
            if acc > iv.hi:
                return True
            if acc <= iv.lo:
                return False
            if self.exact_target is not None:
                return acc > self.exact_target + shift
            bits *= 2
            if bits > MAX_BITS:
                raise RuntimeError("target enclosure too coarse to run the construction")

    def _emit(self, l: int, case: int):
        n = len(self.sigma) + 1
        if l in self.null.free:
            raise AssertionError(f"index {l} emitted twice")
        self.null.use(l)
        self.sigma.append(l)
        self.cases.append(case)
        bits = self.bits
        a, b = self._z(n, bits)
        c, d = self._z(l, bits)
        if self._d and self._d[-1][2] == bits:
            lo, hi = self._d[-1][0] + a - d, self._d[-1][1] + b - c
        else:
            lo, hi = self._d_now(bits)
        self._d.append((lo, hi, bits))
        xlo, xhi = self._x(bits)
        self._dist.append((max(hi - xlo, xhi - lo), bits))

    def _check_envelope(self, N: int):
        bound = self._env[-1][1]
        dist, bits = self._dist[N - 1]
        lo, hi, _ = self._d[N - 1]
        xlo, xhi = self._x(bits)
        dist_lo = max(lo - xhi, xlo - hi, 0)
        num = bound.numerator << bits
        if dist_lo * bound.denominator > num:
            self.envelope_violations.append(N)

    def _decide(self, bits: int, dlo, dhi, exact: bool):
        """(case, index) for the next step given D_r enclosed in [dlo, dhi]."""
        z = self.null
        r = len(self.sigma)
        if exact:
            X = self.exact_target
            xlo = xhi = X
            zv = lambda j: (z.value(j), z.value(j))
            div = lambda p, k: (p[0] / k, p[1] / k)
            as_frac = lambda v: v
        else:
            xlo, xhi = self._x(bits)
            zv = lambda j: self._z(j, bits)
            div = lambda p, k: (p[0] // k, -(-p[1] // k))
            one = 1 << bits
            as_frac = lambda v: Fraction(v, one)
        if dlo >= xhi:
            return 1, z.max_unused()
        if not dhi < xlo:
            raise _Ambiguous
        alo, ahi = xlo - dhi, xhi - dlo  # alpha = x - D_r > 0
        slo = shi = 0
        j = r
        tlo = thi = None
        while True:
            j += 1
            a, b = zv(j)
            slo, shi = slo + a, shi + b
            tlo = a if tlo is None else min(tlo, a)
            thi = b if thi is None else min(thi, b)
            if slo > ahi:
                break
            if not shi <= alo:
                raise _Ambiguous
        k2 = j - r
        dl, dh = div((slo - ahi, shi - alo), k2)
        th_lo, th_hi = min(dl, tlo), min(dh, thi)
        if th_hi <= 0:
            raise _Ambiguous
        l = z.least_unused_below(as_frac(th_hi))
        if not zv(l)[1] < th_lo:
            raise _Ambiguous
        return 2, l

    def step(self) -> int:
        """Emit sigma(N+1) and return it."""
        if self.identity:
            n = len(self.sigma) + 1
            self.null.use(n)
            self.sigma.append(n)
            self.cases.append(0)
            self._d.append((0, 0, self.bits))
            self._dist.append((0, self.bits))
            return n
        r = len(self.sigma)
        while True:
            lo, hi, bits = self._d[-1]
            if bits != self.bits:
                lo, hi = self._d_now(self.bits)
                bits = self.bits
            try:
                case, l = self._decide(bits, lo, hi, exact=False)
                break
            except _Ambiguous:
                pass
            if self.exact_target is not None:
                d = self.exact_difference()
                case, l = self._decide(0, d, d, exact=True)
                self.exact_steps += 1
                break
            self.bits *= 2
            if self.bits > MAX_BITS:
                raise RuntimeError("precision limit reached while deciding a step")
        prev = self.cases[-1]
        if prev and case != prev:
            # D_r lies on the other side of x than D_{r-1}
            self.crossings.append(r)
            self._env.append((r, abs(self.null.value(r) - self.null.value(self.sigma[r - 1]))))
            self._check_envelope(r)
        self._emit(l, case)
        return l

    def run(self, steps: int) -> "DifferenceStream":
        while len(self.sigma) < steps:
            self.step()
        return self

    def __iter__(self) -> Iterator[int]:
        n = 0
        while True:
            if n >= len(self.sigma):
                self.step()
            yield self.sigma[n]
            n += 1

    # -- diagnostics --------------------------------------------------------------

    @property
    def used_values(self) -> set[int]:
        return set(self.sigma)

    def difference(self, N: int) -> Interval:
        """Enclosure of D_N = sum_{n<=N} (z_n - z_sigma(n))."""
        lo, hi, bits = self._d[N - 1]
        return Interval(Fraction(lo, 1 << bits), Fraction(hi, 1 << bits))

    def distance_upper(self, N: int) -> Fraction:
        d, bits = self._dist[N - 1]
        return Fraction(d, 1 << bits)

    def envelope(self, N: int) -> Optional[Fraction]:
        """|z_c - z_sigma(c)| at the last crossing c <= N (the initial bound before any)."""
        if self.identity:
            return Fraction(0)
        out = None
        for start, bound in self._env:
            if start <= N:
                out = bound
        return out

    def envelope_failures(self) -> list[int]:
        """Steps N >= k1 where |D_N - x| certainly exceeds the current envelope."""
        if self.identity:
            return []
        bad, k = [], 0
        env = self._env
        for N in range(self.k1, len(self.sigma) + 1):
            while k + 1 < len(env) and env[k + 1][0] <= N:
                k += 1
            lo, hi, bits = self._d[N - 1]
            xlo, xhi = self._x(bits)
            dist_lo = max(lo - xhi, xlo - hi, 0)
            b = env[k][1]
            if dist_lo * b.denominator > (b.numerator << bits):
                bad.append(N)
        return bad

    def stable_from(self, eps) -> Optional[int]:
        """Least N0 with |D_N - x| <= eps certified for all N0 <= N <= len(sigma)."""
        eps = Q(eps)
        n0 = None
        for N in range(len(self.sigma), 0, -1):
            d, bits = self._dist[N - 1]
            if d * eps.denominator > (eps.numerator << bits):
                break
            n0 = N
        return n0

    def negative_steps(self) -> list[int]:
        """Steps where D_N < 0 is certified."""
        return [N for N, (lo, hi, _) in enumerate(self._d, 1) if hi < 0]

    def injective(self) -> bool:
        return len(set(self.sigma)) == len(self.sigma)


@dataclass
class PermutationStream:
    """sigma on the positive integers, moving only indices inside ``support_in``.

    ``engine`` acts on the support's own enumeration (j -> position(j)).
    """

    engine: DifferenceStream
    support_in: Optional[SymbolicSet] = None
    piece: Optional[HarmonicPiece] = None

    def _index(self, n: int) -> Optional[int]:
        if self.piece is None:
            return n
        p = self.piece
        if n < p.pos_first or (n - p.pos_first) % p.pos_step:
            return None
        return (n - p.pos_first) // p.pos_step + 1

    def _pos(self, j: int) -> int:
        return j if self.piece is None else self.piece.position(j)

    def sigma(self, n: int) -> int:
        j = self._index(n)
        if j is None:
            return n
        self.engine.run(j)
        return self._pos(self.engine.sigma[j - 1])

    def prefix(self, N: int) -> list[int]:
        return [self.sigma(n) for n in range(1, N + 1)]

    def __iter__(self) -> Iterator[int]:
        n = 0
        while True:
            n += 1
            yield self.sigma(n)

    @property
    def used_values(self) -> set[int]:
        return {self._pos(j) for j in self.engine.sigma}


def _difference_engine(s: Series, x, bits: int) -> DifferenceStream:
    if s.convergence_class is not ConvergenceClass.DIVERGENT_NULL:
        raise DomainError(f"need a divergent series of positive null terms, got {s.convergence_class}")
    return DifferenceStream(positive_null(s, 1), x, bits)


def rearrange_difference_to(s: Series, x, bits: int = 256) -> PermutationStream:
    """sigma with sum (x_n - x_sigma(n)) = x for a divergent positive null series."""
    x = Q(x)
    if x < 0:
        raise DomainError("x must be >= 0")
    return PermutationStream(_difference_engine(s, x, bits))


# ---------------------------------------------------------------------------
# Riemann targeting
# ---------------------------------------------------------------------------


@dataclass
class RiemannStream:
    series: Series
    target: Fraction
    sign: int                       # sign class carrying the support (0: identity)
    stream: Optional[PermutationStream]
    bits: int = 256
    _sum: list = field(default_factory=list)  # scaled partial sums (lo, hi)

    @property
    def support(self) -> Optional[SymbolicSet]:
        return None if self.stream is None else self.stream.support_in

    def sigma(self, n: int) -> int:
        return n if self.stream is None else self.stream.sigma(n)

    def _term_scaled(self, n: int) -> tuple[int, int]:
        v = self.series.term(n)
        t = v.numerator << self.bits
        return t // v.denominator, -(-t // v.denominator)

    def extend(self, N: int) -> None:
        while len(self._sum) < N:
            n = len(self._sum) + 1
            a, b = self._term_scaled(self.sigma(n))
            lo, hi = self._sum[-1] if self._sum else (0, 0)
            self._sum.append((lo + a, hi + b))

    def partial(self, N: int) -> Interval:
        self.extend(N)
        lo, hi = self._sum[N - 1]
        one = 1 << self.bits
        return Interval(Fraction(lo, one), Fraction(hi, one))

    def run_until(self, tol, max_steps: int = 10**6) -> Optional[int]:
        """First N <= max_steps with |sum_{n<=N} x_sigma(n) - target| <= tol certified."""
        tol = Q(tol)
        one = 1 << self.bits
        t = self.target
        tlo = (t.numerator * one) // t.denominator
        thi = -(-(t.numerator * one) // t.denominator)
        tol_s = (tol.numerator * one) // tol.denominator
        for N in range(1, max_steps + 1):
            self.extend(N)
            lo, hi = self._sum[N - 1]
            if max(hi - tlo, thi - lo) <= tol_s:
                return N
        return None

    def support_ok(self, N: int) -> bool:
        """Every moved index among 1..N lies in the support sign class."""
        for n in range(1, N + 1):
            m = self.sigma(n)
            if m != n and not (self.sign * self.series.term(n) > 0 and self.sign * self.series.term(m) > 0):
                return False
        return True


def riemann_rearrange(s: Series, target, bits: int = 256) -> RiemannStream:
    """Rearrangement with sum_n x_sigma(n) = target, moving only one sign class."""
    if s.convergence_class is not ConvergenceClass.CONDITIONAL:
        raise DomainError(f"need a conditionally convergent series, got {s.convergence_class}")
    target = Q(target)
    signs = s.sign_sets()
    if signs is None:
        raise Refusal("sign classes are not symbolically expressible")
    b = bits
    while True:
        y = s.total_at(b)
        if y.is_point and y.lo == target:
            return RiemannStream(s, target, 0, None, bits)
        if target < y.lo or target > y.hi:
            break
        b *= 2
        if b > MAX_BITS:
            raise RuntimeError("cannot separate the target from the series sum")
    sign = 1 if target < y.lo else -1
    piece = s.harmonic_piece(sign)
    if piece is None:
        raise Refusal(f"sign class {sign:+d} of {s.family} is not a certified harmonic-like sequence")
    # positives: sum (z - z_sigma) = y - target; negatives: target - y
    if sign > 0:
        provider = lambda bb: s.total_at(bb) - target
    else:
        provider = lambda bb: target - s.total_at(bb)
    engine = DifferenceStream(HarmonicNull(piece), provider, bits)
    support = Progression(piece.pos_first, piece.pos_step)
    return RiemannStream(s, target, sign, PermutationStream(engine, support, piece), bits)


# ---------------------------------------------------------------------------
# shifted half-line and full-line constructions
# ---------------------------------------------------------------------------


@dataclass
class HalflineSeries:
    """x_n = y_tau(n) with sum (y_n - y_tau(n)) = -a, so every difference sum is >= a."""

    a: Fraction
    base: Series
    tau: DifferenceStream

    def term(self, n: int) -> Fraction:
        self.tau.run(n)
        return self.tau.null.value(self.tau.sigma[n - 1])

    def terms(self, N: int) -> list[Fraction]:
        return [self.term(n) for n in range(1, N + 1)]

    def lower_bound_check(self, sigma_prefix: Sequence[int]) -> tuple[Fraction, Fraction, bool]:
        """(sum_{n<=N} (x_n - x_sigma(n)), -D^tau_N, value >= -D^tau_N).

        sum_{n<=N} y_n >= sum_{n<=N} x_sigma(n) for a non-increasing y, so the
        partial difference is at least sum_{n<=N} (x_n - y_n) = -D^tau_N,
        which tends to a.
        """
        N = len(sigma_prefix)
        if len(set(sigma_prefix)) != N:
            raise DomainError("sigma prefix is not injective")
        value = sum((self.term(n) for n in range(1, N + 1)), Fraction(0)) - \
            sum((self.term(m) for m in sigma_prefix), Fraction(0))
        floor_ = -self.tau.exact_difference(N) if self.a != 0 else Fraction(0)
        return value, floor_, value >= floor_

    def compose(self, b, steps: int) -> tuple[Interval, Fraction, Fraction]:
        """Target a + b: the partial difference at ``steps``, its envelope, and a + b.

        With pi targeting b on y and sigma = tau^{-1} pi, x_sigma(n) = y_pi(n).
        """
        b = Q(b)
        if b < 0:
            raise DomainError("b must be >= 0")
        pi = DifferenceStream(self.tau.null.fresh(), b).run(steps)
        self.tau.run(steps)
        val = pi.difference(steps) - self.tau.difference(steps)
        env = (pi.envelope(steps) or 0) + (self.tau.envelope(steps) or 0)
        return val, env, self.a + b


def shifted_halfline_series(a, base: Series, bits: int = 256) -> HalflineSeries:
    a = Q(a)
    if a > 0:
        raise DomainError("a must be <= 0")
    if base.convergence_class is not ConvergenceClass.DIVERGENT_NULL:
        raise DomainError("base must be a divergent positive null series")
    null = positive_null(base, 1)
    if not null.monotone:
        raise DomainError("base terms must be non-increasing")
    return HalflineSeries(a, base, DifferenceStream(null, -a, bits))


@dataclass
class FullLineReport:
    blocks: list[SymbolicSet]
    streams: list[DifferenceStream]
    pieces: list[HarmonicPiece]
    steps: int
    disjoint: bool

    def sigma(self, n: int) -> int:
        for piece, st in zip(self.pieces, self.streams):
            if n >= piece.pos_first and (n - piece.pos_first) % piece.pos_step == 0:
                j = (n - piece.pos_first) // piece.pos_step + 1
                st.run(j)
                return piece.position(st.sigma[j - 1])
        return n

    def terms(self, base: Series, N: int) -> list[Fraction]:
        """y_n = x_sigma(n) for n <= N."""
        return [base.term(self.sigma(n)) for n in range(1, N + 1)]

    def reach(self, subset: Sequence[int]) -> tuple[Fraction, Interval, Fraction]:
        """(target -sum_{k in A} 1/k, enclosure of the prefix difference, envelope bound).

        tau = sigma^{-1} on the chosen blocks gives sum over A_k of
        (y_n - y_tau(n)) = -D^(k), so the prefix value is -sum D^(k).
        """
        target = -sum((Fraction(1, k) for k in subset), Fraction(0))
        val = Interval.point(0)
        env = Fraction(0)
        for k in subset:
            st = self.streams[k - 1]
            val = val - st.difference(self.steps)
            env += st.envelope(self.steps) or 0
        return target, val, env


def full_line_difference_prefix(base: Series, m: int, steps: int = 20000,
                                bits: int = 256) -> FullLineReport:
    """Blocks A_k = {n : n = 2^{k-1} mod 2^k} of the base's index set, each rearranged to 1/k."""
    if not 1 <= m <= 8:
        raise DomainError("m must lie in 1..8")
    if base.convergence_class is not ConvergenceClass.DIVERGENT_NULL:
        raise DomainError("base must be a divergent positive null series")
    root = base.harmonic_piece(1)
    if root is None:
        raise Refusal("no divergence certificate for the blocks of this base")
    pieces, blocks, streams = [], [], []
    for k in range(1, m + 1):
        off = 2 ** (k - 1) - 1
        piece = HarmonicPiece(root.pos_first + off * root.pos_step, 2**k * root.pos_step,
                              root.num, root.val_first + off * root.val_step, 2**k * root.val_step)
        pieces.append(piece)
        blocks.append(Progression(piece.pos_first, piece.pos_step))
        streams.append(DifferenceStream(HarmonicNull(piece), Fraction(1, k), bits).run(steps))
    disjoint = all((blocks[i] & blocks[j]).is_empty()
                   for i in range(m) for j in range(i + 1, m))
    return FullLineReport(blocks, streams, pieces, steps, disjoint)


# ---------------------------------------------------------------------------
# SR_I classification
# ---------------------------------------------------------------------------


@dataclass
class WitnessCertificate:
    witness: SymbolicSet
    plus: Optional[bool]   # True: sum of x^+ over the witness diverges
    minus: Optional[bool]

    def to_json(self) -> dict:
        word = {True: "diverges", False: "converges", None: "unknown"}
        return {"witness": self.witness.to_expr(), "plus": word[self.plus], "minus": word[self.minus]}


@dataclass
class SRClass:
    value: str  # Singleton | FullLine | ContainsLeftHalfline | ContainsRightHalfline
    anchor: Interval
    certificates: list[WitnessCertificate]
    reason: str
    caveat: str = ""

    def to_json(self) -> dict:
        return {"class": self.value, "anchor": self.anchor.to_pair(), "reason": self.reason,
                "caveat": self.caveat, "certificates": [c.to_json() for c in self.certificates]}


def _part_divergence(s: Series, w: SymbolicSet, sign: int) -> Optional[bool]:
    pieces = s.abs_pieces()
    if pieces is None:
        return None
    verdicts = []
    for piece, kind, sg in pieces:
        if sg != sign:
            continue
        if kind == "summable":
            verdicts.append(False)
            continue
        # |x_n| is comparable with 1/n on the piece
        verdicts.append(WEIGHTS["harmonic"].diverges(w & piece))
    if any(v is True for v in verdicts):
        return True
    if all(v is False for v in verdicts):
        return False
    return None


def _contained_in_abs_summable(s: Series, ideal: Ideal) -> Optional[str]:
    """A syntactic reason why every set in the ideal has sum |x_n| < infinity."""
    if isinstance(ideal, FinIdeal):
        return "every finite set is absolutely summable"
    if isinstance(ideal, GeneratedIdeal):
        for g in ideal.generators:
            if _part_divergence(s, g, 1) is not False or _part_divergence(s, g, -1) is not False:
                return None
        return "every generator is absolutely summable"
    if isinstance(ideal, SummableIdeal) and ideal.weights_name == "harmonic":
        if s.abs_pieces() is not None:
            return "|x_n| <= c/n, so the harmonic summable ideal is inside the ideal of |x_n|"
        return None
    if isinstance(ideal, IntersectionIdeal):
        return _contained_in_abs_summable(s, ideal.left) or _contained_in_abs_summable(s, ideal.right)
    return None


def sr_classify(s: Series, ideal: Ideal, witnesses: Sequence[SymbolicSet] = ()) -> SRClass:
    """Which of the four SR_I shapes holds, certified, or :class:`Refusal`."""
    if s.convergence_class is not ConvergenceClass.CONDITIONAL:
        raise DomainError(f"need a conditionally convergent series, got {s.convergence_class}")
    for w in witnesses:
        v = ideal.membership(w)
        if v is not IN:
            raise Refusal(f"witness {w.to_expr()} has verdict {v} in {ideal.to_expr()}")
    pool = list(witnesses)
    for g in ideal_generators(ideal) or []:
        if ideal.membership(g) is IN and g not in pool:
            pool.append(g)
    certs = [WitnessCertificate(w, _part_divergence(s, w, 1), _part_divergence(s, w, -1))
             for w in pool]
    anchor = s.total_at(64)
    both = [c for c in certs if c.plus is True and c.minus is True]
    plus = [c for c in certs if c.plus is True]
    minus = [c for c in certs if c.minus is True]
    if both:
        return SRClass("FullLine", anchor, certs,
                       f"x^+ and x^- both diverge on {both[0].witness.to_expr()}")
    if plus and minus:
        return SRClass("FullLine", anchor, certs,
                       f"the union of {plus[0].witness.to_expr()} and {minus[0].witness.to_expr()} "
                       "is in the ideal and carries both divergences")
    caveat = "certified over supplied witnesses"
    if plus:
        if any(c.minus is None for c in plus):
            raise Refusal("x^- over a plus-divergent witness is not certified")
        return SRClass("ContainsLeftHalfline", anchor, certs,
                       f"x^+ diverges and x^- converges on {plus[0].witness.to_expr()}", caveat)
    if minus:
        if any(c.plus is None for c in minus):
            raise Refusal("x^+ over a minus-divergent witness is not certified")
        return SRClass("ContainsRightHalfline", anchor, certs,
                       f"x^- diverges and x^+ converges on {minus[0].witness.to_expr()}", caveat)
    reason = _contained_in_abs_summable(s, ideal)
    if reason is not None:
        return SRClass("Singleton", anchor, certs, reason)
    raise Refusal("no certificate decides the class; supply witnesses with divergence certificates")


# ---------------------------------------------------------------------------
# greedy representation
# ---------------------------------------------------------------------------


@dataclass
class GreedyResult:
    bits: list[int]
    residuals: list[Fraction]
    terminated_at: Optional[int]

    @property
    def chosen(self) -> list[int]:
        return [n for n, e in enumerate(self.bits, 1) if e]


def greedy_subset_representation(s: Series, y, steps: int = 64) -> GreedyResult:
    """eps_n = 1 iff the residual y - sum_{k<n} eps_k x_k is at least x_n."""
    y = Q(y)
    if s.convergence_class is not ConvergenceClass.ABSOLUTE:
        raise DomainError("greedy representation needs an absolutely convergent series")
    pat = s.kakeya_pattern()
    signs = s.sign_sets()
    if pat is None or pat.kind not in ("equal", "le") or pat.start != 1:
        raise Refusal("interval condition |x_n| <= r_n is not certified for all n")
    if signs is None or not signs[1].is_empty():
        raise Refusal("greedy representation needs positive terms")
    total = s.total.lo
    if not 0 <= y <= total:
        raise DomainError(f"y must lie in [0, {fmt(total)}]")
    res = y
    tail = s.tail_abs(0).lo
    bits, residuals, done = [], [], None
    for n in range(1, steps + 1):
        x = s.term(n)
        tail -= x
        e = 1 if res >= x else 0
        res -= e * x
        bits.append(e)
        residuals.append(res)
        if not 0 <= res <= tail:
            raise AssertionError(f"residual invariant failed at step {n}")
        if res == 0 and done is None:
            done = n
    return GreedyResult(bits, residuals, done)


__all__ = ["PositiveNull", "HarmonicNull", "BlockNull", "positive_null", "DifferenceStream",
           "PermutationStream", "rearrange_difference_to", "RiemannStream", "riemann_rearrange",
           "HalflineSeries", "shifted_halfline_series", "FullLineReport",
           "full_line_difference_prefix", "WitnessCertificate", "SRClass", "sr_classify",
           "GreedyResult", "greedy_subset_representation"]
