import math

import pytest
from hypothesis import given, settings, strategies as st

from semient.errors import DomainError, PropertyViolation
from semient.estimate import Verdict
from semient.models import (
    ascent_norm, digit_sum, free_semigroup, index_shift, longest_unit_run, multiply_by, naturals,
    predicted_ascent_entropy, word,
)
from semient.semigroup import (
    NormedSemigroupModel, PseudonormedSemigroupModel, SemigroupEndomorphism, bernoulli_shift, coproduct_endomorphism,
    coproduct_model, element_entropy, identity_endomorphism, left_trajectory, norm_sequence, product_endomorphism,
    product_model, semigroup_entropy, semigroup_entropy_at, single_coordinate, trajectory,
)

words = st.lists(st.integers(-3, 6), min_size=1, max_size=7).map(tuple)


def concatenated(w, n, left=False):
    copies = [tuple(i + k for i in w) for k in range(n)]
    if left:
        copies.reverse()
    return tuple(i for c in copies for i in c)


@given(words, st.integers(1, 6))
def test_trajectories_are_concatenations(w, n):
    S, phi = free_semigroup(), index_shift(1)
    assert trajectory(S, phi, w, n) == concatenated(w, n)
    assert left_trajectory(S, phi, w, n) == concatenated(w, n, left=True)


@settings(max_examples=60)
@given(words)
def test_ascent_entropy_closed_form(w):
    S, phi = free_semigroup("ascent"), index_shift(1)
    for left in (False, True):
        brute = ascent_norm(concatenated(w, 21, left)) - ascent_norm(concatenated(w, 20, left))
        est = semigroup_entropy_at(S, phi, w, left=left)
        assert est.verdict is Verdict.EXACT
        assert est.value == brute == predicted_ascent_entropy(w, left)


@given(words)
def test_left_and_right_differ_by_at_most_one(w):
    right, left = predicted_ascent_entropy(w), predicted_ascent_entropy(w, left=True)
    assert left in (right, right - 1)


@given(st.lists(st.integers(-3, 6), min_size=2, max_size=7).map(tuple))
def test_unit_run_longer_words_have_zero_entropy(w):
    S, phi = free_semigroup("unit_run"), index_shift(1)
    for left in (False, True):
        norms = norm_sequence(S, phi, w, 12, left=left)
        assert max(norms) < 2 * len(w)
        assert semigroup_entropy_at(S, phi, w, left=left).value == 0


def test_unit_run_single_letter():
    S, phi = free_semigroup("unit_run"), index_shift(1)
    assert semigroup_entropy_at(S, phi, word(4)).value == 1
    assert semigroup_entropy_at(S, phi, word(4), left=True).value == 0
    assert longest_unit_run((1, 2, 3, 5, 6)) == 3


def test_word_rejects_empty():
    with pytest.raises(DomainError):
        word()


@given(st.integers(1, 200), st.integers(1, 200))
def test_norms_on_naturals_are_subadditive(a, b):
    for norm in ("id", "log1p", "sqrt", "digits", "bounded"):
        S = naturals(norm)
        assert S.value(a + b) <= S.value(a) + S.value(b) + 1e-12


@given(st.integers(1, 10**6), st.integers(2, 10))
def test_digit_sum(n, base):
    digits = []
    m = n
    while m:
        digits.append(m % base)
        m //= base
    assert digit_sum(n, base) == sum(digits)


@given(st.integers(1, 40))
def test_entropy_bounded_by_norm(x):
    S = naturals("id")
    est = semigroup_entropy_at(S, identity_endomorphism(), x, budget=10)
    assert est.value == x
    assert semigroup_entropy_at(naturals("bounded"), identity_endomorphism(), x).value == 0


def test_norm_bound_violation_is_reported():
    bad = NormedSemigroupModel(op=lambda a, b: a + b, norm=lambda x: x * x, name="square")
    with pytest.raises(PropertyViolation):
        semigroup_entropy_at(bad, identity_endomorphism(), 1, budget=8)


def test_pseudonorm_limit_may_fail():
    S = PseudonormedSemigroupModel(op=lambda a, b: a + b, norm=lambda x: x * (1 + (x.bit_length() % 2)))
    est = element_entropy(S, 1, budget=16)
    assert est.verdict is Verdict.INCONCLUSIVE


def test_digit_norm_under_doubling():
    S, phi = naturals("digits"), multiply_by(2)
    est = semigroup_entropy_at(S, phi, 1, budget=16)
    assert est.value == 1


def test_product_takes_max_and_coproduct_takes_sum():
    A, B = naturals("id"), naturals("id")
    ids = identity_endomorphism()
    prod = semigroup_entropy_at(product_model(A, B), product_endomorphism(ids, ids), (2, 5), budget=8)
    assert prod.value == 5
    cop = semigroup_entropy_at(coproduct_model([A, B]), coproduct_endomorphism([ids, ids]), (2, 5), budget=8)
    assert cop.value == 7


def test_product_rejects_mixed_norm_kinds():
    counting = NormedSemigroupModel(op=lambda a, b: a | b, norm=len, log_norm=True)
    with pytest.raises(DomainError):
        product_model(naturals("id"), counting)


def test_bernoulli_normalization():
    M = naturals("bounded", bound=7)
    model, right = bernoulli_shift(M, "right")
    _, left = bernoulli_shift(M, "left")
    family = [single_coordinate(k, 0, 0) for k in (1, 3, 7, 9)]
    assert semigroup_entropy(model, right, family, budget=10).value == 7
    assert semigroup_entropy(model, left, family, budget=10).value == 0


def test_endomorphism_power_and_composition():
    double = multiply_by(2)
    assert double.power(3)(1) == 8
    assert double.compose(SemigroupEndomorphism(lambda x: x + 1))(1) == 4
    with pytest.raises(DomainError):
        double.power(0)


def test_log_subadditivity_of_counting_norm():
    S = NormedSemigroupModel(op=lambda a, b: a | b, norm=lambda s: max(len(s), 1), log_norm=True)
    shift = SemigroupEndomorphism(lambda s: frozenset(x + 1 for x in s))
    c = [S.value(trajectory(S, shift, frozenset({0, 2}), n)) for n in range(1, 8)]
    assert all(c[i + j + 1] <= c[i] + c[j] + 1e-12 for i in range(7) for j in range(7) if i + j + 1 < 7)
    assert math.isclose(c[0], math.log(2))
