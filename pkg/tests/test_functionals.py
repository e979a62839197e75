import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from semient.abelian import DirectSumGroupFlow, TailRule, bernoulli_flow, finite_flow, lattice_flow
from semient.errors import DomainError, UnsupportedEndomorphism
from semient.functionals import (
    FiniteIndexSubgroup, PeriodicRow, RandomRow, bounded_abelian_corpus, check_row, cotrajectory,
    cotrajectory_indices, index_of_rows, preimage_functional,
)


def evaluate(row, x):
    return sum(a * row[j] for j, a in enumerate(x)) % row.modulus


@st.composite
def finite_flows(draw):
    m = draw(st.sampled_from([2, 3, 4]))
    d = draw(st.integers(1, 3))
    return finite_flow([m] * d, [[draw(st.integers(0, m - 1)) for _ in range(d)] for _ in range(d)])


@settings(max_examples=40, deadline=None)
@given(finite_flows(), st.integers(0, 100), st.integers(1, 3))
def test_index_matches_kernel_count(flow, seed, count):
    N = FiniteIndexSubgroup.random(flow, count, seed)
    group = list(itertools.product(*[range(m) for m in flow.moduli]))
    kernel = [x for x in group if N.contains(x)]
    assert N.index == len(group) // len(kernel)
    C = cotrajectory(flow, N, 3)
    inside = [x for x in group if all(N.contains(flow.apply_power(x, k)) for k in range(3))]
    assert C.index == len(group) // len(inside)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 99), st.integers(1, 4))
def test_cotrajectory_indices_monotone_and_log_subadditive(k, count):
    flow = bounded_abelian_corpus(100, seed=0)[k]
    N = FiniteIndexSubgroup.random(flow, count, seed=k)
    indices, _ = cotrajectory_indices(flow, N, 6)
    assert indices == sorted(indices)
    logs = [math.log(i) for i in indices]
    for a in range(6):
        for b in range(6):
            if a + b + 1 < 6:
                assert logs[a + b + 1] <= logs[a] + logs[b] + 1e-12


@pytest.mark.parametrize("flow", [
    bernoulli_flow(4),
    bernoulli_flow(3, "left"),
    DirectSumGroupFlow({0: {0: 1, 2: 2}}, exponent=4, tail=TailRule(1, 3, 2)),
])
def test_pulled_back_rows_compose(flow):
    f = PeriodicRow((1, 0, 2), (3, 1), flow.exponent)
    g = preimage_functional(flow, f)
    for j in range(12):
        e = flow.basis_vector(j)
        assert g[j] == evaluate(f, flow.apply(e))
    lazy = RandomRow(5, flow.exponent)
    h = preimage_functional(flow, lazy)
    for j in range(12):
        assert h[j] == evaluate(lazy, flow.apply(flow.basis_vector(j)))


def test_periodic_rows_are_canonical():
    assert PeriodicRow((1, 2, 1, 2), (1, 2), 3) == PeriodicRow((), (1, 2), 3)
    assert PeriodicRow((0,), (0, 0), 2).block == (0,)


def test_periodic_index_is_exact_and_random_index_saturates():
    rows = [PeriodicRow((), (1, 0), 2), PeriodicRow((), (0, 1), 2), PeriodicRow((), (1, 1), 2)]
    result = index_of_rows(rows, 2)
    assert result.exact and result.index == 4
    random_rows = [RandomRow(s, 2) for s in range(4)]
    assert index_of_rows(random_rows, 2).index == 16


def test_coordinate_cotrajectories_under_shifts():
    flow = bernoulli_flow(2)
    N = FiniteIndexSubgroup.coordinates(flow, [0])
    indices, exact = cotrajectory_indices(flow, N, 5)
    assert exact and indices == [2, 2, 2, 2, 2]
    left = bernoulli_flow(2, "left")
    indices, _ = cotrajectory_indices(left, FiniteIndexSubgroup.coordinates(left, [0]), 5)
    assert indices == [2, 4, 8, 16, 32]


def test_rows_must_be_homomorphisms():
    flow = finite_flow([2, 4], [[1, 0], [0, 1]])
    with pytest.raises(DomainError):
        check_row(flow, PeriodicRow.finite([1, 1], 4))
    check_row(flow, PeriodicRow.finite([2, 1], 4))
    with pytest.raises(UnsupportedEndomorphism):
        FiniteIndexSubgroup(lattice_flow([[2]]), [])


def test_corpus_is_reproducible():
    a = bounded_abelian_corpus(20, seed=3)
    b = bounded_abelian_corpus(20, seed=3)
    assert all(x.same_endomorphism(y) for x, y in zip(a, b))
