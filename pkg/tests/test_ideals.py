import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from achieveset.ideals import (FIN, IN, NOT_IN, UNKNOWN, DensityIdeal, NotRepresentable,
                               Submeasure, SummableIdeal, TriVerdict, dual_filter_member,
                               generated, ideal_generators, intersect_ideals, maximal_ideal,
                               membership, parse_ideal, submeasure_fin_membership)
from achieveset.sets import (EVEN, ODD, POWERS_OF_TWO, SQUARES, Complement, Finite, ParseError,
                             Progression, union)

from conftest import finite_sets, semilinear_sets

HARMONIC = SummableIdeal("harmonic")
IDEALS = [FIN, HARMONIC, DensityIdeal(), generated(EVEN), generated(Progression(3, 3), Finite((1,))),
          intersect_ideals(generated(EVEN), HARMONIC)]
ideals = st.sampled_from(IDEALS)


def test_generated_even_rejects_odd():
    assert membership(generated(EVEN), ODD) is NOT_IN


def test_harmonic_summable_squares_and_progressions():
    assert membership(HARMONIC, SQUARES) is IN
    assert membership(HARMONIC, POWERS_OF_TWO) is IN
    assert membership(HARMONIC, Progression(2, 2)) is NOT_IN


def test_density_ideal():
    d = DensityIdeal()
    assert membership(d, SQUARES) is IN
    assert membership(d, Progression(1, 5)) is NOT_IN


def test_dual_filter_examples():
    assert dual_filter_member(FIN, Complement(Finite((1,)))) is IN
    assert dual_filter_member(generated(EVEN), union(ODD, Finite((2,)))) is IN
    assert dual_filter_member(FIN, EVEN) is NOT_IN


def test_intersection_examples():
    both = intersect_ideals(generated(EVEN), generated(ODD))
    assert membership(both, EVEN) is NOT_IN
    assert membership(both, Finite((4,))) is IN
    assert membership(intersect_ideals(FIN, DensityIdeal()), SQUARES) is NOT_IN


def test_generators_must_not_cover_a_cofinite_set():
    with pytest.raises(ValueError):
        generated(EVEN, ODD)


def test_maximal_ideal_is_refused():
    with pytest.raises(NotRepresentable):
        maximal_ideal()
    with pytest.raises(NotRepresentable):
        parse_ideal("(maximal)")


def test_ideal_generators_of_intersection():
    gens = ideal_generators(intersect_ideals(generated(EVEN), generated(Progression(3, 3))))
    assert [g.to_expr() for g in gens] == ["(inter (prog 2 2) (prog 3 3))"]
    assert ideal_generators(HARMONIC) is None


def test_counting_submeasure_progression():
    phi = Submeasure.counting()
    assert submeasure_fin_membership(phi, Progression(1, 4), 100, 10**4) is NOT_IN
    assert phi.phi(Progression(1, 4), 404) == 101


def test_geometric_submeasure_total_mass():
    phi = Submeasure.weighted(Fraction(1, 2))
    assert submeasure_fin_membership(phi, Progression(1, 3), 2, 10) is IN


def test_harmonic_submeasure_even_stays_below_ten():
    # direct float oracle: sum of 1/n over even n <= 10^6 is H(500000)/2, about 6.85
    oracle = 0.5 * math.fsum(1.0 / j for j in range(1, 500001))
    assert 6.8 < oracle < 6.9
    phi = Submeasure.weighted("harmonic")
    assert submeasure_fin_membership(phi, EVEN, 10, 10**6) is UNKNOWN
    assert submeasure_fin_membership(phi, EVEN, 6, 10**6) is NOT_IN


@given(st.integers(1, 60), st.integers(1, 60))
def test_submeasure_monotone_in_level(k1, k2):
    phi = Submeasure.weighted("harmonic")
    lo, hi = sorted((k1, k2))
    assert phi.phi(ODD, lo) <= phi.phi(ODD, hi)


@given(finite_sets, finite_sets)
def test_submeasure_subadditive_on_disjoint_sets(a, b):
    phi = Submeasure.weighted("harmonic")
    b = b - a
    assert phi.phi(union(a, b), 50, 64) <= phi.phi(a, 50, 64) + phi.phi(b, 50, 64) + Fraction(2, 2**64)


@pytest.mark.parametrize("text", ["(fin)", "(density)", "(summable harmonic)",
                                  "(generated (prog 2 2))",
                                  "(cap (generated (prog 2 2)) (summable harmonic))"])
def test_parse_round_trip(text):
    assert parse_ideal(text).to_expr() == text


@pytest.mark.parametrize("bad", ["(summable geometric)", "(bogus)", "(fin", "(generated nat)"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_ideal(bad)


@given(ideals, finite_sets)
def test_fin_inside_every_ideal(ideal, s):
    assert membership(ideal, s) is IN


@given(ideals, semilinear_sets, semilinear_sets)
def test_downward_closure(ideal, t, x):
    s = t & x
    if membership(ideal, t) is IN:
        assert membership(ideal, s) is not NOT_IN


@given(ideals, semilinear_sets, semilinear_sets)
def test_union_closure(ideal, s, t):
    if membership(ideal, s) is IN and membership(ideal, t) is IN:
        assert membership(ideal, s | t) is IN


@given(ideals, semilinear_sets)
def test_duality_involution(ideal, s):
    assert dual_filter_member(ideal, Complement(s)) is membership(ideal, s)


def test_triverdict_of():
    assert TriVerdict.of(True) is IN and TriVerdict.of(None) is UNKNOWN
    assert str(NOT_IN) == "NotIn"
