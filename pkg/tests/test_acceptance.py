"""Acceptance suite: one test per criterion, summarized at the end of the run."""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from semient.abelian import bernoulli_flow, finite_flow, lattice_flow
from semient.duality import ent_star_bridge_check, shift_bridge_check, weiss_bridge_check
from semient.estimate import ExactValue, Verdict
from semient.exact import IntPolynomial, RatMatrix
from semient.freegroup import free_identity
from semient.functionals import FiniteIndexSubgroup, bounded_abelian_corpus
from semient.functors import (
    CylinderPartition, bernoulli_measure, ent, ent_star, h_alg, h_mes_symbolic, markov_measure, span_subset,
)
from semient.growth import (
    dichotomy_experiment, growth_sequence, lattice_entropy, random_lattice_corpus, residue_lower_bound,
    residue_system, symmetric_ball, uniform_rate, diagonal_corpus,
)
from semient.mahler import ayf_addition_check, ayf_entropy, mahler_measure
from semient.models import free_semigroup, index_shift, predicted_ascent_entropy, word
from semient.selftest import run_battery
from semient.semigroup import (
    left_semigroup_entropy, left_semigroup_entropy_at, semigroup_entropy, semigroup_entropy_at,
)
from semient.setmaps import catalog

# 50-digit mpmath.polyroots on Lehmer's polynomial
LEHMER_ORACLE = 0.16235761200773813943
# numpy evaluation of -sum pi_i P_ij log P_ij
MARKOV_ORACLES = {
    ((Fraction(1, 2), Fraction(1, 2)), (1, 0)): 0.46209812037329684,
    ((Fraction(9, 10), Fraction(1, 10)), (Fraction(3, 10), Fraction(7, 10))): 0.39652830555730956,
}
MARKOV_STATIONARY = {
    ((Fraction(1, 2), Fraction(1, 2)), (1, 0)): (Fraction(2, 3), Fraction(1, 3)),
    ((Fraction(9, 10), Fraction(1, 10)), (Fraction(3, 10), Fraction(7, 10))): (Fraction(3, 4), Fraction(1, 4)),
}


def _elapsed(t0):
    return time.perf_counter() - t0


@pytest.mark.criterion(1, "Bernoulli values of ent and h_alg")
@pytest.mark.parametrize("K", [2, 3, 4])
def test_bernoulli_values(K):
    t0 = time.perf_counter()
    right = bernoulli_flow(K, "right")
    e0, e1 = right.basis_vector(0), right.basis_vector(1)
    by_ent = ent(right, [[e0], [e0, e1]], budget=20)
    assert by_ent.verdict is Verdict.EXACT
    assert by_ent.exact.equals(ExactValue(Fraction(1), Fraction(K)))

    budget = {2: 16, 3: 10, 4: 8}[K]
    by_alg = h_alg(right, [span_subset(right, [e0])], budget=budget)
    assert by_alg.verdict is Verdict.EXACT
    assert by_alg.exact.equals(ExactValue(Fraction(1), Fraction(K)))

    left = bernoulli_flow(K, "left")
    f0, f1 = left.basis_vector(0), left.basis_vector(1)
    assert ent(left, [[f0], [f0, f1]], budget=20).exact.is_zero()
    assert h_alg(left, [span_subset(left, [f0, f1])], budget=budget).exact.is_zero()
    assert _elapsed(t0) < 5


@pytest.mark.criterion(2, "Mahler-measure entropy of matrices")
def test_ayf_values():
    t0 = time.perf_counter()
    assert abs(ayf_entropy([[2]]) - math.log(2)) < 1e-9
    golden = (1 + math.sqrt(5)) / 2
    assert abs(ayf_entropy([[1, 1], [1, 0]]) - math.log(golden)) < 1e-9
    assert abs(ayf_entropy([[Fraction(1, 2)]]) - math.log(2)) < 1e-9
    assert _elapsed(t0) < 1


@pytest.mark.criterion(3, "Lehmer's measure and multiplicativity")
def test_mahler_lehmer_and_multiplicativity():
    lehmer = IntPolynomial([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
    assert abs(mahler_measure(lehmer).value - LEHMER_ORACLE) < 1e-9

    rng = random.Random(3)

    def random_poly():
        deg = rng.randint(1, 6)
        coeffs = [rng.randint(-5, 5) for _ in range(deg)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
        return IntPolynomial(coeffs)

    worst = 0.0
    for _ in range(200):
        f, g = random_poly(), random_poly()
        gap = abs(mahler_measure(f * g).value - mahler_measure(f).value - mahler_measure(g).value)
        worst = max(worst, gap)
    assert worst < 1e-8


@pytest.mark.criterion(4, "Addition over block upper-triangular matrices")
def test_addition_theorem():
    t0 = time.perf_counter()
    rng = random.Random(4)

    def entry():
        return Fraction(rng.randint(-5, 5), rng.randint(1, 5))

    def block(r, c):
        return [[entry() for _ in range(c)] for _ in range(r)]

    for _ in range(100):
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        A = RatMatrix.block_upper(RatMatrix(block(p, p)), block(p, q), RatMatrix(block(q, q)))
        report = ayf_addition_check(A, p)
        assert report.difference < 1e-7, (A, report)
    assert _elapsed(t0) < 30


def _integer_eigenvalues(A):
    tr, det = A[0][0] + A[1][1], A[0][0] * A[1][1] - A[0][1] * A[1][0]
    disc = tr * tr - 4 * det
    if disc < 0 or math.isqrt(disc) ** 2 != disc:
        return None
    r = math.isqrt(disc)
    return (tr + r) // 2, (tr - r) // 2


@pytest.mark.criterion(5, "trajectory lower bounds against the Mahler value")
def test_trajectory_bounds_against_ayf():
    rng = random.Random(5)
    checked = agreed = 0
    while checked < 50:
        A = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
        if max(abs(np.linalg.eigvals(np.array(A, dtype=float)))) > 3:
            continue
        checked += 1
        h = ayf_entropy(A)
        ball = symmetric_ball(2)
        bounds = [residue_lower_bound(A, ball, 12, cap=5000).value]
        singular = A[0][0] * A[1][1] == A[0][1] * A[1][0]
        if not singular:
            F = sorted(set(ball) | set(residue_system(A)))
            bounds.append(residue_lower_bound(A, F, 12, cap=5000).value)
        assert max(bounds) <= h + 1e-6, (A, bounds, h)
        eig = _integer_eigenvalues(A)
        diagonalizable = eig is not None and (eig[0] != eig[1] or A[0][1] == A[1][0] == 0)
        if diagonalizable:
            assert abs(max(bounds) - h) < 0.05, (A, bounds, h)
            agreed += 1
    assert agreed > 0


@pytest.mark.criterion(6, "bridge suite")
def test_bridge_suite():
    t0 = time.perf_counter()
    reports = []
    for m in (2, 3, 4):
        for side in ("right", "left"):
            flow = bernoulli_flow(m, side)
            e = [flow.basis_vector(i) for i in range(2)]
            reports.append(weiss_bridge_check(flow, [[e[0]], e], budget=10))
            family = [FiniteIndexSubgroup.random(flow, k, seed=m) for k in range(1, 7)]
            reports.append(ent_star_bridge_check(flow, family, budget=8))
    rng = random.Random(6)
    for _ in range(5):
        m, d = rng.choice([2, 3, 4]), rng.randint(1, 3)
        flow = finite_flow([m] * d, [[rng.randrange(m) for _ in range(d)] for _ in range(d)])
        basis = [flow.basis_vector(i) for i in range(d)]
        reports.append(weiss_bridge_check(flow, [basis[:1], basis], budget=10))
        family = [FiniteIndexSubgroup.random(flow, k, seed=7) for k in (1, 2)]
        reports.append(ent_star_bridge_check(flow, family, budget=8))
    for lam in catalog():
        for m in (2, 3):
            for r in shift_bridge_check(lam, m):
                assert r.constant == f"log {m}"
                reports.append(r)
    failures = [(r.check, r.subject, r.status) for r in reports if not r.equal]
    assert not failures
    assert _elapsed(t0) < 60


@pytest.mark.criterion(7, "ent* dichotomy on bounded abelian flows")
def test_adjoint_dichotomy():
    for k, flow in enumerate(bounded_abelian_corpus(100, seed=0)):
        family = [FiniteIndexSubgroup.random(flow, j, seed=k) for j in range(1, 7)]
        est = ent_star(flow, family, budget=8)
        zero = est.verdict is Verdict.EXACT and est.value == 0
        assert zero or est.verdict is Verdict.DIVERGENT, (flow.name, est.verdict, est.value)
    for side in ("right", "left"):
        flow = bernoulli_flow(2, side)
        est = ent_star(flow, [FiniteIndexSubgroup.random(flow, j, seed=1) for j in range(1, 8)], budget=8)
        assert est.verdict is Verdict.DIVERGENT
        values = [m.value for m in est.members]
        rises = sum(1 for a, b in zip(values, values[1:]) if b > a)
        assert rises >= 5 and rises == len(values) - 1


def _ascent_slope(w, left):
    """``v(T_{n+1}) - v(T_n)`` for large ``n`` by direct concatenation."""
    def norm(n):
        copies = [tuple(i + k for i in w) for k in range(n)]
        if left:
            copies.reverse()
        flat = [i for c in copies for i in c]
        return 1 + sum(1 for a, b in zip(flat, flat[1:]) if a < b)
    return norm(31) - norm(30)


@pytest.mark.criterion(8, "free-semigroup counterexamples")
def test_free_semigroup_counterexamples():
    t0 = time.perf_counter()
    S, phi = free_semigroup("ascent"), index_shift(1)
    x0 = word(0)
    right = semigroup_entropy_at(S, phi, x0)
    left = left_semigroup_entropy_at(S, phi, x0)
    assert right.verdict is Verdict.EXACT and right.exact.coefficient == 1
    assert left.verdict is Verdict.EXACT and left.exact.is_zero()

    rng = random.Random(8)
    words = [tuple(rng.randrange(5) for _ in range(rng.randint(1, 6))) for _ in range(50)]
    for w in words:
        h = semigroup_entropy_at(S, phi, w).value
        h_left = left_semigroup_entropy_at(S, phi, w).value
        assert h == _ascent_slope(w, False) == predicted_ascent_entropy(w)
        assert h_left == _ascent_slope(w, True) == predicted_ascent_entropy(w, left=True)
        first, last = w[0], w[-1]
        assert (h_left == h - 1) == (last in (first, first - 1))
        if first > last + 1:
            assert h_left == h
        assert (h_left == h) == (first > last + 1 or last > first)

    U = free_semigroup("unit_run")
    family = [word(0), word(3)] + words
    total = semigroup_entropy(U, phi, family)
    total_left = left_semigroup_entropy(U, phi, family)
    assert total.verdict is Verdict.EXACT and total.value == 1
    assert total_left.verdict is Verdict.EXACT and total_left.value == 0
    assert _elapsed(t0) < 5


@pytest.mark.criterion(9, "growth of groups and flows")
def test_growth():
    F2 = free_identity(2)
    X = F2.symmetric_generators()
    sample = growth_sequence(F2, X, 10)
    assert sample.values == [2 * 3 ** n - 1 for n in range(1, 11)]
    assert abs(h_alg(F2, [X], budget=10).value - math.log(3)) < 1e-6

    lambdas = []
    for m in (2, 3, 4):
        flow = lattice_flow([[m]])
        Xm = [(k,) for k in range(-m, m + 1)]
        est = h_alg(flow, [Xm], budget=10)
        assert est.verdict is Verdict.EXACT and est.exact.equals(ExactValue(Fraction(1), Fraction(m)))
        lambdas.append((uniform_rate(flow, [Xm], 8).upper, lattice_entropy(flow)))

    report = dichotomy_experiment(random_lattice_corpus(100, seed=0))
    assert report.intermediate == []

    beta = bernoulli_flow(2)
    F = [beta.zero(), beta.basis_vector(0)]
    lambdas.append((uniform_rate(beta, [F], 12).upper, h_alg(beta, [F], budget=12).value))
    lambdas.append((uniform_rate(F2, [X], 10).upper, h_alg(F2, [X], budget=10).value))
    for flow in diagonal_corpus(10, seed=9):
        lambdas.append((uniform_rate(flow, [symmetric_ball(2)], 7).upper, lattice_entropy(flow)))
    assert all(lam <= h + 1e-9 for lam, h in lambdas), lambdas


@pytest.mark.criterion(10, "measure entropy of symbolic shifts")
def test_measure_entropy():
    coordinate2, coordinate3 = CylinderPartition.coordinate(2), CylinderPartition.coordinate(3)
    fair = h_mes_symbolic(bernoulli_measure([Fraction(1, 2)] * 2), [coordinate2])
    assert abs(fair.value - math.log(2)) < 1e-9
    skewed = h_mes_symbolic(bernoulli_measure([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]), [coordinate3])
    assert abs(skewed.value - 1.5 * math.log(2)) < 1e-9

    instances = [
        (bernoulli_measure([Fraction(1, 2)] * 2), 2),
        (bernoulli_measure([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]), 3),
        (bernoulli_measure([Fraction(1, 3), Fraction(2, 3)]), 2),
    ]
    for P, oracle in MARKOV_ORACLES.items():
        mu = markov_measure(P, MARKOV_STATIONARY[P])
        est = h_mes_symbolic(mu, [coordinate2])
        assert abs(est.value - oracle) < 1e-9
        instances.append((mu, 2))
    for mu, k in instances:
        pairs = CylinderPartition.make(2, range(k * k))
        est = h_mes_symbolic(mu, [CylinderPartition.coordinate(k), pairs], budget=6)
        assert est.value <= math.log(k) + 1e-9


@pytest.mark.criterion(11, "property battery")
def test_property_battery():
    t0 = time.perf_counter()
    results = run_battery(seed=0)
    failed = [r.line() for r in results if not r.passed]
    assert not failed
    assert _elapsed(t0) < 120
