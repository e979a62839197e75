import itertools

import pytest
from hypothesis import given, settings, strategies as st

from semient.abelian import (
    DirectSumGroupFlow, FiniteSubgroup, TailRule, bernoulli_flow, finite_flow, identity_flow, lattice_flow,
    product_flow, subgroup_trajectory_orders, subset_trajectory_sizes,
)
from semient.errors import DomainError, ResourceError


@st.composite
def finite_flows(draw):
    m = draw(st.sampled_from([2, 3, 4, 5]))
    d = draw(st.integers(1, 3))
    A = [[draw(st.integers(0, m - 1)) for _ in range(d)] for _ in range(d)]
    return finite_flow([m] * d, A)


def brute_trajectory(flow, F, n):
    """``F + phi F + ... + phi^(n-1) F`` by explicit sums."""
    layers, layer = [], list(F)
    for _ in range(n):
        layers.append(layer)
        layer = [flow.apply(x) for x in layer]
    out = {flow.zero()}
    for layer in layers:
        out = {flow.op(a, b) for a in out for b in layer}
    return out


@settings(max_examples=40, deadline=None)
@given(finite_flows(), st.data())
def test_subset_sizes_match_explicit_sums_and_bounds(flow, data):
    elements = list(itertools.product(*[range(m) for m in flow.moduli]))
    F = data.draw(st.lists(st.sampled_from(elements), min_size=1, max_size=3, unique=True))
    sizes = subset_trajectory_sizes(flow, F, 4)
    for n, size in enumerate(sizes, start=1):
        assert size == len(brute_trajectory(flow, F, n))
        assert len(F) <= size <= len(F) ** n
    assert sizes == subset_trajectory_sizes(flow, F, 4, left=True)


@settings(max_examples=40, deadline=None)
@given(finite_flows(), st.data())
def test_subgroup_orders_match_enumeration(flow, data):
    elements = list(itertools.product(*[range(m) for m in flow.moduli]))
    gens = data.draw(st.lists(st.sampled_from(elements), min_size=1, max_size=2))
    orders = subgroup_trajectory_orders(flow, gens, 4)
    span = FiniteSubgroup(flow, gens).elements()
    for n, order in enumerate(orders, start=1):
        assert order == len(brute_trajectory(flow, span, n))
    assert orders == sorted(orders)


def test_bernoulli_orders_are_powers():
    flow = bernoulli_flow(3)
    assert subgroup_trajectory_orders(flow, [flow.basis_vector(0)], 6) == [3 ** k for k in range(1, 7)]
    left = bernoulli_flow(3, "left")
    assert subgroup_trajectory_orders(left, [left.basis_vector(2)], 6) == [3, 9, 27, 27, 27, 27]


def test_cap_is_optional():
    flow = bernoulli_flow(2)
    with pytest.raises(ResourceError) as err:
        subgroup_trajectory_orders(flow, [flow.basis_vector(0)], 10, cap=100)
    assert err.value.partial == [2, 4, 8, 16, 32, 64]


def test_lattice_rejects_subgroup_trajectories():
    with pytest.raises(DomainError):
        subgroup_trajectory_orders(lattice_flow([[2]]), [(1,)], 3)


def test_column_orders_are_checked():
    with pytest.raises(DomainError):
        DirectSumGroupFlow({0: {1: 1}}, moduli=[2, 3])
    with pytest.raises(DomainError):
        TailRule(0, 1, -1)


def test_elements_and_tails():
    flow = DirectSumGroupFlow({0: {0: 2}}, exponent=4, tail=TailRule(1, 3, 1))
    x = flow.element({0: 1, 2: 5})
    assert x == (1, 0, 1)
    assert flow.apply(x) == (2, 0, 0, 3)
    assert flow.element(0) == ()
    assert flow.order_of((2,)) == 2


def test_power_matches_iteration():
    flow = DirectSumGroupFlow({0: {1: 1}}, exponent=3, tail=TailRule(1, 2, 1))
    cube = flow.power(3)
    for k in range(5):
        e = flow.basis_vector(k)
        assert cube.apply(e) == flow.apply_power(e, 3)


def test_canonical_table_identifies_redundant_columns():
    a = DirectSumGroupFlow({0: {1: 1}, 1: {2: 1}}, exponent=2, tail=TailRule(2, 1, 1))
    b = bernoulli_flow(2)
    assert a.same_endomorphism(b)
    assert not a.same_endomorphism(identity_flow(2))


def test_product_flow_acts_componentwise():
    left, right = finite_flow([2], [[1]]), finite_flow([3, 3], [[0, 1], [1, 0]])
    both = product_flow(left, right)
    assert both.moduli == (2, 3, 3)
    assert both.apply((1, 1, 2)) == (1, 2, 1)
