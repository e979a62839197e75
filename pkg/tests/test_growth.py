import csv
import io
import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from semient.abelian import bernoulli_flow, lattice_flow
from semient.errors import DomainError, UnsupportedEndomorphism
from semient.freegroup import FreeGroupFlow, free_identity
from semient.growth import (
    alg_entropy_vs_growth, classify_growth, diagonal_corpus, growth_csv, growth_rate_element, growth_sequence,
    make_sample, missing_generators, residue_lower_bound, residue_system, symmetric_ball, unipotent_corpus,
    uniform_rate,
)
from semient.mahler import ayf_entropy


def reduced_words_up_to(n):
    letters = (1, -1, 2, -2)
    count = 0
    for length in range(n + 1):
        for w in itertools.product(letters, repeat=length):
            if all(a != -b for a, b in zip(w, w[1:])):
                count += 1
    return count


def test_free_group_ball_matches_enumeration():
    F2 = free_identity(2)
    sample = growth_sequence(F2, F2.symmetric_generators(), 6)
    assert sample.values == [reduced_words_up_to(n) for n in range(1, 7)]


@pytest.mark.parametrize("values, kind, parameter", [
    ([n * n for n in range(1, 16)], "Polynomial", 2),
    ([n ** 3 + n for n in range(1, 16)], "Polynomial", 3),
    ([2 ** n for n in range(1, 16)], "Exponential", 2),
    ([3 ** n + n for n in range(1, 16)], "Exponential", 3),
])
def test_classification_of_recurrent_sequences(values, kind, parameter):
    verdict = classify_growth(values)
    assert verdict.kind == kind and verdict.parameter == pytest.approx(parameter)


def test_subexponential_sequence_is_flagged():
    values = [round(2 ** math.sqrt(n)) for n in range(1, 41)]
    assert classify_growth(values).kind == "Intermediate-candidate"


def test_verdict_strings():
    assert str(classify_growth([n * n for n in range(1, 16)])) == "Polynomial(2)"
    assert str(classify_growth([2 ** n for n in range(1, 16)])) == "Exponential(2)"


def test_classification_needs_enough_terms():
    with pytest.raises(DomainError):
        classify_growth([1, 2, 4])


def test_unipotent_and_diagonal_corpora():
    for flow in unipotent_corpus(5):
        sample = growth_sequence(flow, symmetric_ball(2), 12)
        assert classify_growth(sample).kind == "Polynomial"
    for flow in diagonal_corpus(5):
        sample = growth_sequence(flow, symmetric_ball(2), 12, cap=20000, allow_truncation=True)
        assert classify_growth(sample).kind == "Exponential"


def test_entropy_agrees_with_growth_type():
    report = alg_entropy_vs_growth(lattice_flow([[1, 1], [0, 1]]), symmetric_ball(2), 12)
    assert report.consistent is True and report.entropy.value == 0
    report = alg_entropy_vs_growth(lattice_flow([[2]]), [(-1,), (0,), (1,)], 10)
    assert report.consistent is True and report.verdict.kind == "Exponential"


def test_csv_columns():
    rows = list(csv.reader(io.StringIO(growth_csv(make_sample([1, 4, 9, 16])))))
    assert rows[0] == ["n", "gamma", "log_gamma_over_n", "log_gamma_over_log_n"]
    assert rows[1][3] == "" and rows[3][1] == "9"
    assert float(rows[3][3]) == pytest.approx(2.0)


def test_generation_checks():
    beta = bernoulli_flow(2)
    assert missing_generators(beta, [beta.basis_vector(0)]) == []
    assert missing_generators(beta, [beta.basis_vector(1)]) == [beta.basis_vector(0)]
    F2 = free_identity(2)
    assert missing_generators(F2, [(1,)]) == [(2,)]
    with pytest.raises(DomainError):
        uniform_rate(F2, [[(1,)]], 5)


def test_uniform_rate_on_free_group():
    F2 = free_identity(2)
    report = uniform_rate(F2, [F2.symmetric_generators()], 8)
    assert report.lower == 0 and report.upper == pytest.approx(math.log(3))


def test_element_growth():
    flow = lattice_flow([[2, 1], [1, 1]])
    est = growth_rate_element(flow, (1, 0), symmetric_ball(2), 14)
    assert est.value == pytest.approx(math.log((3 + math.sqrt(5)) / 2))
    nilpotent = lattice_flow([[0, 1], [0, 0]])
    assert growth_rate_element(nilpotent, (0, 1), symmetric_ball(2), 5).value == 0
    with pytest.raises(UnsupportedEndomorphism):
        growth_rate_element(flow, (1, 0), [(1, 0), (0, 1), (1, 1)], 5)
    doubling = FreeGroupFlow(2, {0: "ab", 1: "b"})
    free = growth_rate_element(doubling, (1,), doubling.symmetric_generators(False), 10)
    assert free.value == 0


def test_residue_system_represents_every_class():
    A = [[2, 1], [-1, 3]]
    reps = residue_system(A)
    assert len(reps) == abs(2 * 3 + 1)
    with pytest.raises(DomainError):
        residue_system([[1, 2], [2, 4]])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2))
def test_residue_bound_never_exceeds_entropy(A):
    bound = residue_lower_bound(A, symmetric_ball(2), 6, cap=3000)
    assert 0 <= bound.value <= ayf_entropy(A) + 1e-9


def test_residue_bound_is_sharp_on_a_residue_system():
    A = [[3, 1], [0, 2]]
    bound = residue_lower_bound(A, residue_system(A), 4)
    assert bound.counts == [6, 36, 216, 1296]
    assert bound.value == pytest.approx(math.log(6))
    singular = residue_lower_bound([[2, 4], [1, 2]], symmetric_ball(2), 5)
    assert singular.quotient_rank == 1 and singular.value == pytest.approx(math.log(4))
