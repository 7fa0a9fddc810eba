"""Achievement sets: subset sums, hulls, Kakeya classes and ideal-supported sums."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .ideals import (IN, UNKNOWN, Ideal, IntersectionIdeal, TriVerdict, dual_filter_member,
                     ideal_generators)
from .numeric import DomainError, Interval, Refusal, fmt
from .series import ConvergenceClass, Series, same_set
from .sets import Complement, Finite, SymbolicSet, union

MAX_DEPTH = 30
MAX_IDEAL_DEPTH = 20


def _check_depth(k: int, cap: int) -> None:
    if not 1 <= k <= cap:
        raise DomainError(f"depth must lie in 1..{cap}, got {k}")


def _mask_indices(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


# ---------------------------------------------------------------------------
# subset sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubsetSum:
    value: Fraction
    count: int
    witness: tuple[int, ...]


def _scaled(values: Sequence[Fraction], extra: Sequence[Fraction] = ()):
    """Common denominator L and the integer numerators of ``values`` and ``extra``."""
    L = 1
    for v in (*values, *extra):
        L = math.lcm(L, v.denominator)
    nums = [v.numerator * (L // v.denominator) for v in values]
    ext = [v.numerator * (L // v.denominator) for v in extra]
    return L, nums, ext


def _level_sums(nums: list[int], bound: int):
    """All 2^k masked sums; position p holds the sum over the bits of p."""
    dtype = np.int64 if bound < 2**62 else object
    out = np.zeros(1, dtype=dtype)
    for t in nums:
        out = np.concatenate([out, out + t])
    return out


def _distinct_sums(nums: list[int], bound: int):
    vals = _level_sums(nums, bound)
    order = np.argsort(vals, kind="stable")
    s = vals[order]
    if len(s) > 1:
        starts = np.concatenate([[0], np.nonzero(s[1:] != s[:-1])[0] + 1])
    else:
        starts = np.array([0])
    counts = np.diff(np.concatenate([starts, [len(s)]]))
    # stable sort: the first element of each run has the smallest mask
    return s[starts], counts, order[starts]


def subset_sums(s: Series, k: int) -> list[SubsetSum]:
    """Every sum over F ⊆ {1..k} with its multiplicity and the least-mask witness."""
    _check_depth(k, MAX_DEPTH)
    terms = s.terms(k)
    L, nums, _ = _scaled(terms)
    bound = sum(abs(t) for t in nums) + 1
    values, counts, masks = _distinct_sums(nums, bound)
    return [SubsetSum(Fraction(int(v), L), int(c), _mask_indices(int(m)))
            for v, c, m in zip(values, counts, masks)]


# ---------------------------------------------------------------------------
# hulls
# ---------------------------------------------------------------------------


@dataclass
class HullReport:
    k: int
    pieces: list[Interval]
    gap: Fraction
    contains_guarantee: bool = True

    @property
    def total_length(self) -> Fraction:
        return sum((p.width for p in self.pieces), Fraction(0))

    def contains(self, x) -> bool:
        return any(x in p for p in self.pieces)

    def to_json(self) -> dict:
        return {"k": self.k, "pieces": [p.to_pair() for p in self.pieces], "gap": fmt(self.gap)}


def hull(s: Series, k: int) -> HullReport:
    """Cover of A(x_n) by the merged intervals [v - N_k, v + P_k] over level-k sums v.

    ``gap`` bounds the distance from any hull point to the nearest level-k sum.
    """
    _check_depth(k, MAX_DEPTH)
    if s.convergence_class is not ConvergenceClass.ABSOLUTE:
        raise DomainError(f"hull needs an absolutely convergent series, got {s.convergence_class}")
    P, N = s.tail_pos(k).hi, s.tail_neg(k).hi
    terms = s.terms(k)
    L, nums, (Pn, Nn) = _scaled(terms, (P, N))
    bound = sum(abs(t) for t in nums) + Pn + Nn + 1
    u, _, _ = _distinct_sums(nums, bound)
    diffs = np.diff(u)
    breaks = np.nonzero(diffs > Pn + Nn)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [len(u) - 1]])
    pieces = [Interval(Fraction(int(u[a]) - Nn, L), Fraction(int(u[b]) + Pn, L))
              for a, b in zip(starts, ends)]
    inner = np.delete(diffs, breaks) if len(diffs) else diffs
    gap_n = max([Pn, Nn] + ([int(inner.max())] if len(inner) else []))
    return HullReport(k, pieces, Fraction(gap_n, L), True)


def hausdorff_to_interval(pieces: Sequence[Interval], target: Interval) -> Fraction:
    """Hausdorff distance between a finite union of intervals and ``target``."""
    if not pieces:
        raise DomainError("empty piece list")
    excess = max(Fraction(0), target.lo - pieces[0].lo, pieces[-1].hi - target.hi)
    # points of the target farthest from the union
    miss = Fraction(0)
    if target.lo < pieces[0].lo:
        miss = max(miss, pieces[0].lo - target.lo)
    if target.hi > pieces[-1].hi:
        miss = max(miss, target.hi - pieces[-1].hi)
    for a, b in zip(pieces, pieces[1:]):
        lo, hi = max(a.hi, target.lo), min(b.lo, target.hi)
        if lo < hi:
            # farthest point of [lo, hi] from {a.hi, b.lo}
            mid = (a.hi + b.lo) / 2
            if lo <= mid <= hi:
                miss = max(miss, (b.lo - a.hi) / 2)
            else:
                miss = max(miss, min(lo - a.hi, b.lo - lo), min(hi - a.hi, b.lo - hi))
    return max(excess, miss)


# ---------------------------------------------------------------------------
# Kakeya classification and measure
# ---------------------------------------------------------------------------


@dataclass
class KakeyaVerdict:
    cls: str
    strict: list[int] = field(default_factory=list)
    equal: list[int] = field(default_factory=list)
    less: list[int] = field(default_factory=list)
    start: Optional[int] = None
    certified: bool = False
    note: str = ""

    @property
    def failures(self) -> list[int]:
        """Indices where the strict inequality |x_n| > r_n fails."""
        return sorted(self.equal + self.less)

    def to_json(self) -> dict:
        return {"class": self.cls, "start": self.start, "certified": self.certified,
                "strict_failures": self.failures, "note": self.note}


def _abs_tails(s: Series, horizon: int) -> list[Interval]:
    """r_0 .. r_horizon as enclosures."""
    r0 = s.tail_abs(0)
    if r0.is_point:
        out, r = [r0], r0.lo
        for n in range(1, horizon + 1):
            r -= abs(s.term(n))
            out.append(Interval.point(r))
        return out
    return [s.tail_abs(n) for n in range(horizon + 1)]


def kakeya_classify(s: Series, horizon: int = 60) -> KakeyaVerdict:
    if s.convergence_class is not ConvergenceClass.ABSOLUTE:
        raise DomainError("Kakeya classification needs an absolutely convergent series")
    tails = _abs_tails(s, horizon)
    v = KakeyaVerdict("Unknown")
    for n in range(1, horizon + 1):
        x, r = abs(s.term(n)), tails[n]
        if x > r.hi:
            v.strict.append(n)
        elif r.is_point and x == r.lo:
            v.equal.append(n)
        elif x <= r.lo:
            v.less.append(n)
    pat = s.kakeya_pattern()
    if pat is None:
        v.note = "no closed-form certificate for this family"
        return v
    observed_strict = set(v.strict)
    tail_idx = range(pat.start, horizon + 1)
    if pat.kind == "strict":
        if not all(n in observed_strict for n in tail_idx):
            v.note = "observed comparisons contradict the family certificate"
            return v
        v.start, v.certified = pat.start, True
        if pat.start == 1:
            v.cls = "CantorLike"
        else:
            v.cls = "Mixed"
            v.note = f"strict inequality certified from n = {pat.start}"
        return v
    if pat.kind in ("equal", "le"):
        if any(n in observed_strict for n in tail_idx):
            v.note = "observed comparisons contradict the family certificate"
            return v
        v.cls, v.start, v.certified = "FiniteUnionOfIntervals", pat.start, True
        return v
    if pat.kind == "alternating":
        v.cls, v.start, v.certified = "Mixed", pat.start, True
        v.note = "|x_n| <= r_n at odd n, |x_n| > r_n at even n"
        return v
    return v


@dataclass
class MeasureReport:
    values: list[tuple[int, Fraction]]
    limit: object

    def to_json(self) -> dict:
        lim = self.limit
        lim_s = None if lim is None else ("inf" if lim == math.inf else fmt(lim))
        return {"values": [[k, fmt(v)] for k, v in self.values], "limit": lim_s}


def measure_estimate(s: Series, k_max: int) -> MeasureReport:
    """The exact sequence 2^k r_k for k = 0..k_max plus the closed-form limit."""
    if s.convergence_class is not ConvergenceClass.ABSOLUTE:
        raise DomainError("measure estimate needs an absolutely convergent series")
    tails = _abs_tails(s, k_max)
    if not all(t.is_point for t in tails):
        raise DomainError("measure estimate needs exact tails")
    return MeasureReport([(k, 2**k * tails[k].lo) for k in range(k_max + 1)], s.measure_limit())


# ---------------------------------------------------------------------------
# ideal-supported sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdealSumSample:
    value: Interval
    finite_part: tuple[int, ...]
    generator: Optional[SymbolicSet]
    k: int
    in_ideal: TriVerdict = IN

    def witness_set(self) -> SymbolicSet:
        f = Finite(self.finite_part)
        if self.generator is None:
            return f
        return union(f, self.generator - Finite(tuple(range(1, self.k + 1))))

    def witness_str(self) -> str:
        fin = "{" + ";".join(map(str, self.finite_part)) + "}"
        if self.generator is None:
            return fin
        return f"{fin}+{self.generator.to_expr()}>{self.k}"


def ideal_sums(s: Series, ideal: Ideal, k: int,
               generators: Sequence[SymbolicSet] = ()) -> list[IdealSumSample]:
    """Samples of A_I: finite sets F ⊆ {1..k}, optionally joined with a generator's tail.

    Each generator must be certified in the ideal; F ∪ (B ∖ {1..k}) is then in
    the ideal by union closure.
    """
    _check_depth(k, MAX_IDEAL_DEPTH)
    prefix = Finite(tuple(range(1, k + 1)))
    for g in generators:
        verdict = ideal.membership(g)
        if verdict is not IN:
            raise Refusal(f"generator {g.to_expr()} has verdict {verdict} in {ideal.to_expr()}")
        if ideal.membership(g - prefix) is not IN:
            raise Refusal(f"tail of {g.to_expr()} not certified in the ideal")
    base = subset_sums(s, k)
    seen: dict[Interval, IdealSumSample] = {}
    for g in (None, *generators):
        offset = Interval.point(0) if g is None else s.subset_tail(g, k)
        for row in base:
            v = offset + row.value
            if v not in seen:
                seen[v] = IdealSumSample(v, row.witness, g, k)
    return sorted(seen.values(), key=lambda smp: (smp.value.lo, smp.value.hi))


def sample_points(samples: Sequence[IdealSumSample]) -> set[Fraction]:
    return {smp.value.lo for smp in samples if smp.value.is_point}


@dataclass
class SymmetrizeReport:
    total: Interval
    filter_samples: list[Interval]
    intersection: list[Fraction]
    symmetric: bool
    reflection_ok: bool
    filter_verdicts: list[TriVerdict]

    def to_json(self) -> dict:
        return {"total": self.total.to_pair(),
                "filter_samples": [v.to_pair() for v in self.filter_samples],
                "intersection": [fmt(x) for x in self.intersection],
                "symmetric": self.symmetric, "reflection_ok": self.reflection_ok}


def symmetrize(s: Series, ideal: Ideal, samples: Sequence[IdealSumSample]) -> SymmetrizeReport:
    """A_{F_I} = total - A_I on samples, plus intersection and symmetry checks."""
    if s.convergence_class is not ConvergenceClass.ABSOLUTE:
        raise DomainError("symmetrize needs an absolutely convergent series")
    total = s.total
    filt = [total - smp.value for smp in samples]
    pts = sample_points(samples)
    fpts = {v.lo for v in filt if v.is_point}
    inter = sorted(pts & fpts)
    symmetric = pts == fpts
    # v and total - v are mirror images about total/2
    reflection_ok = all(total.mid in smp.value + fv for smp, fv in zip(samples, filt))
    # the reflected witness is the complement of F ∪ B, in F_I iff F ∪ B is in I
    gens = {smp.generator for smp in samples}
    verdicts = [dual_filter_member(ideal, Complement(Finite(())) if g is None else Complement(g))
                for g in sorted(gens, key=lambda g: "" if g is None else g.to_expr())]
    return SymmetrizeReport(total, filt, inter, symmetric, reflection_ok, verdicts)


# ---------------------------------------------------------------------------
# extreme points, injectivity, intersection law
# ---------------------------------------------------------------------------


def extreme_point_membership(s: Series, ideal: Ideal) -> tuple[TriVerdict, TriVerdict]:
    """Membership of the unique witnesses of max A(x_n) (positive indices) and min (negative)."""
    if s.convergence_class is not ConvergenceClass.ABSOLUTE:
        raise DomainError("extreme points need an absolutely convergent series")
    signs = s.sign_sets()
    if signs is None or any(s.term(n) == 0 for n in range(1, 65)):
        return UNKNOWN, UNKNOWN
    pos, neg = signs
    return ideal.membership(pos), ideal.membership(neg)


@dataclass(frozen=True)
class InjectivityCertificate:
    kind: str  # Strict | EqualityAt | None
    indices: object = None  # "all" or a tuple of indices

    def __str__(self):
        if self.kind == "EqualityAt":
            return f"EqualityAt({self.indices})"
        return self.kind


def injectivity_check(s: Series, k: int) -> tuple[bool, InjectivityCertificate]:
    sums = subset_sums(s, k)
    level = all(row.count == 1 for row in sums)
    pat = s.kakeya_pattern() if s.convergence_class is ConvergenceClass.ABSOLUTE else None
    if pat is not None and pat.kind == "strict" and pat.start == 1:
        return level, InjectivityCertificate("Strict")
    if pat is not None and pat.kind == "equal" and pat.start == 1:
        return level, InjectivityCertificate("EqualityAt", "all")
    return level, InjectivityCertificate("None")


@dataclass
class IntersectionLawReport:
    k: int
    certificate: InjectivityCertificate
    shared: int
    cap_samples: int
    discrepancies: list[str]

    @property
    def holds(self) -> bool:
        return not self.discrepancies

    def to_json(self) -> dict:
        return {"k": self.k, "certificate": str(self.certificate), "shared": self.shared,
                "cap_samples": self.cap_samples, "discrepancies": self.discrepancies}


def _same_witness(a: IdealSumSample, b: IdealSumSample) -> bool:
    if a.finite_part != b.finite_part:
        return False
    if a.generator is None or b.generator is None:
        return a.generator is b.generator
    return same_set(a.witness_set(), b.witness_set())


def intersection_law_check(s: Series, i: Ideal, j: Ideal, k: int,
                           generators_i: Sequence[SymbolicSet],
                           generators_j: Sequence[SymbolicSet]) -> IntersectionLawReport:
    """Compare A_I ∩ A_J with A_{I∩J} on samples.

    Runs only when the sum map is certified injective (or injective off
    finite/cofinite sets): every shared value must then have a witness in
    I ∩ J, and every I ∩ J sample must lie in both ideals.
    """
    _, cert = injectivity_check(s, min(k, 16))
    if cert.kind == "None":
        raise Refusal("sum map not certified injective; the intersection law is not asserted")
    cap = IntersectionIdeal(i, j)
    cap_gens = ideal_generators(cap)
    if cap_gens is None:
        cap_gens = []
    cap_gens = [g for g in cap_gens if cap.membership(g) is IN]
    si = ideal_sums(s, i, k, generators_i)
    sj = ideal_sums(s, j, k, generators_j)
    sij = ideal_sums(s, cap, k, cap_gens)
    by_i = {smp.value: smp for smp in si if smp.value.is_point}
    by_j = {smp.value: smp for smp in sj if smp.value.is_point}
    issues = []
    shared = sorted(set(by_i) & set(by_j))
    for v in shared:
        a, b = by_i[v], by_j[v]
        if cert.kind == "Strict" and not _same_witness(a, b):
            issues.append(f"{fmt(v.lo)}: distinct witnesses {a.witness_str()} / {b.witness_str()}")
            continue
        if cap.membership(a.witness_set()) is not IN and cap.membership(b.witness_set()) is not IN:
            issues.append(f"{fmt(v.lo)}: no witness certified in the intersection ideal")
    for smp in sij:
        w = smp.witness_set()
        if i.membership(w) is not IN or j.membership(w) is not IN:
            issues.append(f"{smp.value}: intersection sample {smp.witness_str()} not in both ideals")
    return IntersectionLawReport(k, cert, len(shared), len(sij), issues)


def compare_ideal_samples(s: Series, i: Ideal, j: Ideal, k: int,
                          generators_i: Sequence[SymbolicSet],
                          generators_j: Sequence[SymbolicSet]):
    """(equal, values only in A_I samples, values only in A_J samples)."""
    a = {smp.value for smp in ideal_sums(s, i, k, generators_i)}
    b = {smp.value for smp in ideal_sums(s, j, k, generators_j)}
    return a == b, sorted(a - b), sorted(b - a)


def density_cover_count(k: int, max_ones: int) -> tuple[int, Fraction]:
    """Level-k dyadic grid points reachable by sets with at most ``max_ones`` elements."""
    if not 0 <= max_ones <= k <= MAX_DEPTH:
        raise DomainError("need 0 <= max_ones <= k <= 30")
    count = sum(math.comb(k, j) for j in range(max_ones + 1))
    return count, Fraction(count, 2**k)


__all__ = ["SubsetSum", "subset_sums", "HullReport", "hull", "hausdorff_to_interval",
           "KakeyaVerdict", "kakeya_classify", "MeasureReport", "measure_estimate",
           "IdealSumSample", "ideal_sums", "sample_points", "SymmetrizeReport", "symmetrize",
           "extreme_point_membership", "InjectivityCertificate", "injectivity_check",
           "IntersectionLawReport", "intersection_law_check", "compare_ideal_samples",
           "density_cover_count"]
