import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from achieveset.numeric import DomainError, Interval
from achieveset.series import (DIVERGENT, BudgetExhausted, ConstructionError, ConvergenceClass,
                               Duplicated, extract_interval_subseries, make_block_harmonic,
                               make_cantor, make_cantor_plus_point, make_duplicated_quick,
                               make_dyadic, make_geometric, make_harmonic,
                               make_interleaved_conditional, make_missing_singleton,
                               make_open_ai, make_signed_harmonic, make_supset, parse_series,
                               series_from_json)
from achieveset.sets import EVEN, ODD, Finite, ParseError, Progression

F = Fraction


def absolute_families():
    return [
        make_dyadic(), make_cantor(), make_geometric(-3, F(2, 5)),
        make_missing_singleton(Progression(3, 3), 1),
        make_missing_singleton(Progression(2, 5), F(7, 3)),
        make_open_ai(Progression(3, 3), Progression(2, 3), Progression(1, 3)),
        make_supset(EVEN), make_supset(Progression(1, 3)),
        make_cantor_plus_point(), make_duplicated_quick(make_geometric(1, F(1, 5))),
        Duplicated(make_dyadic(), require_quick=False),
    ]


def conditional_families():
    return [make_signed_harmonic(), make_interleaved_conditional()]


def null_families():
    return [make_harmonic(), make_block_harmonic()]


ABSOLUTE = absolute_families()
ALL = ABSOLUTE + conditional_families() + null_families()


# -- geometric ------------------------------------------------------------------


def test_cantor_terms_and_tail():
    s = make_geometric(2, F(1, 3))
    assert s.term(3) == F(2, 27)
    assert s.tail_abs(3) == Interval.point(F(1, 27))


def test_dyadic_total_and_tails():
    s = make_dyadic()
    assert s.total == Interval.point(1)
    for k in range(0, 30):
        assert s.tail_abs(k) == Interval.point(F(1, 2**k))


@pytest.mark.parametrize("ratio", [0, 1, F(3, 2), F(-1, 2)])
def test_geometric_rejects_bad_ratio(ratio):
    with pytest.raises((ConstructionError, DomainError, ValueError)):
        make_geometric(1, ratio)


def test_geometric_rejects_zero_scale():
    with pytest.raises((ConstructionError, DomainError, ValueError)):
        make_geometric(0, F(1, 2))


# -- conditional families ---------------------------------------------------------


def test_interleaved_terms_and_partial_sum():
    s = make_interleaved_conditional()
    assert s.terms(3) == [-1, F(1, 2), F(1, 2)]
    oracle = sum(F((-1) ** j, j) for j in range(1, 11)) + sum(F(1, 2**j) for j in range(1, 11))
    assert s.partial_sum(20) == oracle
    for m in range(1, 15):
        odd = sum(s.term(n) for n in range(1, 2 * m, 2))
        assert odd == sum(F((-1) ** j, j) for j in range(1, m + 1))
    assert s.tail_pos(5) is DIVERGENT and s.tail_neg(5) is DIVERGENT


def test_signed_harmonic():
    s = make_signed_harmonic()
    assert s.term(1) == -1 and s.term(2) == F(1, 2)
    assert s.convergence_class is ConvergenceClass.CONDITIONAL
    assert s.tail_pos(0) is DIVERGENT and s.tail_abs(3) is DIVERGENT
    partial = s.partial_sum(1000)
    assert abs(float(partial) + math.log(2)) <= 1 / 1001
    enc = s.total_at(40)
    assert enc.lo <= -F(math.log(2)) + F(1, 2**45) and -F(math.log(2)) - F(1, 2**45) <= enc.hi
    assert enc.hi - enc.lo <= F(1, 2**40)


def test_interleaved_total_encloses_one_minus_ln2():
    enc = make_interleaved_conditional().total_at(40)
    assert enc.lo <= 1 - F(math.log(2)) + F(1, 2**45)
    assert enc.hi >= 1 - F(math.log(2)) - F(1, 2**45)


# -- missing singleton ------------------------------------------------------------


def test_missing_singleton_terms():
    s = make_missing_singleton(Progression(3, 3), 1)
    # filler in gap 0 is x / (2^2 * 2) by the defining formula
    assert s.term(1) == s.term(2) == F(1, 8)
    assert s.term(3) == F(1, 4) and s.term(6) == F(-1, 4)
    assert s.total_pos == 1 and s.total_neg == F(1, 2)


@pytest.mark.parametrize("x", [1, F(5, 7)])
def test_missing_singleton_block_identity(x):
    s = make_missing_singleton(Progression(3, 3), x)
    for i in range(0, 21):
        assert s.gap_block_sum(i) == F(x) / 2 ** (i + 2)


def test_missing_singleton_positive_and_negative_sums():
    s = make_missing_singleton(Progression(3, 3), 1)
    k = 150
    pos = sum(t for t in s.terms(k) if t > 0)
    neg = sum(t for t in s.terms(k) if t < 0)
    assert pos + s.tail_pos(k).hi == 1
    assert neg - s.tail_neg(k).hi == F(-1, 2)


def test_missing_singleton_rejects_empty_gap():
    with pytest.raises(ConstructionError):
        make_missing_singleton(Progression(1, 1), 1)
    with pytest.raises(ConstructionError):
        make_missing_singleton(Finite((3, 6)), 1)


# -- open-ai and supset ---------------------------------------------------------


def test_open_ai_terms_and_part_sums():
    d, b, e = Progression(3, 3), Progression(2, 3), Progression(1, 3)
    s = make_open_ai(d, b, e)
    assert (s.term(3), s.term(2), s.term(1)) == (F(1, 2), F(-1, 2), F(1, 2))
    assert s.total == Interval.point(1)
    for part, want in ((d, 1), (b, -1), (e, 1)):
        for k in (0, 7, 40):
            head = sum(s.term(n) for n in range(1, k + 1) if part.member(n))
            assert want in head + s.subset_tail(part, k)


def test_open_ai_requires_partition():
    with pytest.raises(ConstructionError):
        make_open_ai(Progression(2, 2), Progression(2, 4), Progression(1, 2))
    with pytest.raises(ConstructionError):
        make_open_ai(Progression(3, 3), Progression(2, 3), Progression(4, 3))


def test_supset():
    s = make_supset(EVEN)
    assert s.term(2) == F(1, 2) and s.term(1) == F(2, 3)
    assert s.subset_tail(EVEN, 0) == Interval.point(1)
    assert s.subset_tail(ODD, 0) == Interval.point(1)
    assert s.total == Interval.point(2)
    with pytest.raises(ConstructionError):
        make_supset(Finite((1, 2)))


# -- cantor plus point and duplicated ---------------------------------------------


def test_cantor_plus_point():
    s = make_cantor_plus_point()
    assert s.terms(3) == [1, F(2, 3), F(2, 9)]
    assert s.tail_abs(1) == Interval.point(1)
    assert s.total == Interval.point(2)


def test_duplicated_quick():
    s = make_duplicated_quick(make_geometric(1, F(1, 5)))
    assert s.terms(4) == [F(1, 5), F(1, 5), F(1, 25), F(1, 25)]
    assert s.subset_tail(ODD, 0) == s.subset_tail(EVEN, 0) == Interval.point(F(1, 4))
    with pytest.raises(ConstructionError):
        make_duplicated_quick(make_dyadic())


# -- divergent null families ---------------------------------------------------------


def test_block_harmonic_prefix_and_block_sums():
    s = make_block_harmonic()
    assert s.terms(7) == [F(1, 2), F(1, 4), F(1, 3), F(1, 8), F(1, 7), F(1, 6), F(1, 5)]
    for b in range(1, 11):
        h = sum(F(1, m) for m in range(1, 2**b + 1))
        # direct summation: the first 2^b - 1 terms are 1/2, ..., 1/2^b in some order
        assert s.partial_sum(2**b - 1) == h - 1


def test_block_harmonic_non_increasing_subseries_bounded():
    s = make_block_harmonic()
    bound = sum(1 / (2**n + 1) for n in range(0, 60))
    # greedy longest non-increasing subsequence of the first 2^12 terms
    last, acc = None, F(0)
    for t in s.terms(2**12 - 1):
        if last is None or t <= last:
            acc += t
            last = t
    assert float(acc) <= bound


@pytest.mark.parametrize("s", null_families(), ids=lambda s: s.family)
@pytest.mark.parametrize("eps", [F(1, 3), F(1, 50), F(1, 1000)])
def test_null_index(s, eps):
    n0 = s.null_index(eps)
    assert all(0 < s.term(n) < eps for n in range(n0, n0 + 500))
    assert s.tail_abs(4) is DIVERGENT


# -- generic invariants ----------------------------------------------------------------


@pytest.mark.parametrize("s", ALL, ids=lambda s: s.family)
def test_terms_nonzero(s):
    assert all(s.term(n) != 0 for n in range(1, 201))


@pytest.mark.parametrize("s", ABSOLUTE, ids=lambda s: s.family)
def test_tail_recursion_and_monotone(s):
    for k in range(0, 41):
        assert s.tail_abs(k).hi == abs(s.term(k + 1)) + s.tail_abs(k + 1).hi
        assert s.tail_abs(k).lo >= s.tail_abs(k + 1).lo >= 0


@pytest.mark.parametrize("s", ABSOLUTE, ids=lambda s: s.family)
def test_tail_soundness(s):
    for k in (0, 3, 11):
        for K in range(k, k + 41):
            window = sum((abs(s.term(n)) for n in range(k + 1, K + 1)), F(0))
            assert window <= s.tail_abs(k).hi


@pytest.mark.parametrize("s", ABSOLUTE, ids=lambda s: s.family)
def test_positive_negative_split(s):
    for k in (0, 5, 20):
        assert s.tail_abs(k).hi == s.tail_pos(k).hi + s.tail_neg(k).hi
        diff = s.tail_pos(k).hi - s.tail_neg(k).hi
        assert s.total.hi - s.partial_sum(k) == diff


@given(st.sampled_from(ABSOLUTE), st.integers(0, 30),
       st.sampled_from([EVEN, ODD, Progression(1, 3), Progression(2, 4), Finite((1, 5, 40))]))
def test_subset_tail_encloses_windows(s, k, part):
    enc = s.subset_tail(part, k)
    window = sum((s.term(n) for n in range(k + 1, k + 41) if part.member(n)), F(0))
    rest = s.tail_abs(k + 40).hi
    assert enc.lo - rest <= window <= enc.hi + rest


def test_subset_tail_refuses_conditional():
    with pytest.raises(DomainError):
        make_signed_harmonic().subset_tail(Progression(1, 7), 0)


# -- interval subseries -------------------------------------------------------------


def _check_blocks(s, x, res):
    prev_max = 0
    for n, (block, y) in enumerate(zip(res.blocks, res.sums), start=1):
        assert block and min(block) > prev_max
        prev_max = max(block)
        assert all(s.term(j) > 0 for j in block)
        assert sum(s.term(j) for j in block) == y
        lower = x if n == 1 else res.sums[n - 2]
        assert lower / 2**n <= y <= 3 * x / 2 ** (n + 1)


def test_interval_subseries_interleaved():
    s = make_interleaved_conditional()
    res = extract_interval_subseries(s, 0, 1, 3)
    _check_blocks(s, 1, res)
    y1, y2, y3 = res.sums
    assert F(1, 4) <= y1 <= F(3, 4) and y1 / 4 <= y2 <= F(3, 8) and y2 / 8 <= y3 <= F(3, 16)


def test_interval_subseries_signed_harmonic():
    s = make_signed_harmonic()
    res = extract_interval_subseries(s, 0, 1, 5)
    _check_blocks(s, 1, res)
    total = sum(res.sums)
    lower = sum(res.sums[:1])
    assert lower <= total <= sum(F(3, 2 ** (n + 1)) for n in range(1, 6))


@given(st.fractions(-3, 3, max_denominator=20), st.fractions(F(1, 10), 4, max_denominator=20),
       st.integers(1, 6))
def test_interval_subseries_property(a, width, depth):
    s = make_signed_harmonic()
    res = extract_interval_subseries(s, a, a + width, depth)
    _check_blocks(s, width, res)


def test_interval_subseries_errors():
    with pytest.raises(DomainError):
        extract_interval_subseries(make_dyadic(), 0, 1, 2)
    with pytest.raises(DomainError):
        extract_interval_subseries(make_signed_harmonic(), 1, 1, 2)
    with pytest.raises(BudgetExhausted):
        extract_interval_subseries(make_signed_harmonic(), 0, 1, 30, budget=200)


# -- parsing ------------------------------------------------------------------------


@pytest.mark.parametrize("s", ALL, ids=lambda s: s.family)
def test_json_round_trip(s):
    back = series_from_json(s.to_json())
    assert back.family == s.family
    assert back.terms(30) == s.terms(30)


@pytest.mark.parametrize("text,first", [
    ("(geom 2 1/3)", [F(2, 3), F(2, 9)]),
    ("(dyadic)", [F(1, 2), F(1, 4)]),
    ("(missing-singleton (prog 3 3) 1)", [F(1, 8), F(1, 8)]),
    ("(open-ai (prog 3 3) (prog 2 3) (prog 1 3))", [F(1, 2), F(-1, 2)]),
    ("(supset (prog 2 2))", [F(2, 3), F(1, 2)]),
    ("(duplicated-quick (geom 1 1/5))", [F(1, 5), F(1, 5)]),
    ("(table 1 -1/2 3)", [1, F(-1, 2)]),
    ('{"family": "cantor", "params": {}}', [F(2, 3), F(2, 9)]),
])
def test_parse_series(text, first):
    assert parse_series(text).terms(2) == first


@pytest.mark.parametrize("bad", ["(geom 1)", "(nosuch)", "(geom 1 2", "{oops", '{"family": "x"}'])
def test_parse_series_errors(bad):
    with pytest.raises((ParseError, ConstructionError, DomainError)):
        parse_series(bad)
