import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semient.errors import DomainError
from semient.estimate import (
    EntropyEstimate, ExactValue, Verdict, berlekamp_massey, count_estimate, fekete_estimate, family_estimate,
    find_recurrence,
)


def test_berlekamp_massey_fibonacci():
    fib = [1, 1, 2, 3, 5, 8, 13, 21]
    assert berlekamp_massey(fib) == [1, -1, -1]


def test_recurrence_needs_confirmation():
    assert find_recurrence([1, 2, 4]) is None
    assert find_recurrence([1, 2, 4, 8, 16, 32]) == [1, -2]


@given(st.integers(2, 9), st.integers(1, 50))
def test_geometric_counts_are_exact(r, a):
    est = count_estimate([a * r ** n for n in range(1, 10)])
    assert est.verdict is Verdict.EXACT
    assert est.exact.equals(ExactValue(Fraction(1), Fraction(r)))


def test_polynomial_counts_have_zero_entropy():
    est = count_estimate([n * n + 1 for n in range(1, 12)])
    assert est.verdict is Verdict.EXACT and est.exact.is_zero()
    assert est.recurrence["multiplicity"] == 3


def test_counts_must_be_positive():
    with pytest.raises(DomainError):
        count_estimate([1, 0, 2])


def test_affine_tail_is_exact():
    est = fekete_estimate([5, 6, 7, 9, 11, 13, 15, 17, 19])
    assert est.verdict is Verdict.EXACT
    assert est.exact == ExactValue(Fraction(2))
    assert est.tail.onset == 3


def test_convex_growth_is_divergent():
    est = fekete_estimate([n * n for n in range(1, 12)])
    assert est.verdict is Verdict.DIVERGENT and est.value == math.inf


def test_short_sequence_is_inconclusive():
    assert fekete_estimate([1, 2]).verdict is Verdict.INCONCLUSIVE


@given(st.lists(st.floats(0, 5), min_size=1, max_size=12))
def test_fekete_bound_is_min_ratio(c):
    est = fekete_estimate(c)
    assert est.fekete_bound == pytest.approx(min(x / (i + 1) for i, x in enumerate(c)))


def _exact(v):
    return EntropyEstimate([], Verdict.EXACT, v, v, exact=ExactValue(Fraction(v)))


def test_family_terminal_run_diverges():
    members = [_exact(k) for k in range(7)]
    assert family_estimate(members).verdict is Verdict.DIVERGENT


def test_family_rise_that_levels_off_is_not_divergent():
    members = [_exact(v) for v in (0, 1, 2, 3, 4, 5, 5, 5)]
    est = family_estimate(members)
    assert est.verdict is Verdict.EXACT and est.value == 5


def test_exact_value_equality_across_bases():
    assert ExactValue(Fraction(2), Fraction(2)).equals(ExactValue(Fraction(1), Fraction(4)))
    assert ExactValue(Fraction(3, 2), Fraction(4)).equals(ExactValue(Fraction(3), Fraction(2)))
    assert not ExactValue(Fraction(1), Fraction(2)).equals(ExactValue(Fraction(1), Fraction(3)))
    assert ExactValue(Fraction(0), Fraction(5)).equals(ExactValue(Fraction(7), Fraction(1)))
    assert str(ExactValue(Fraction(3, 2), Fraction(2))) == "3/2*log(2)"
