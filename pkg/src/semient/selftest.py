"""Property battery over the registered model catalog.

Each check returns a ``CheckResult``; ``run_battery`` runs them all.  The
``clause`` field tags the checks that back the characterizing properties of
algebraic entropy on abelian groups (conjugation, direct limits, addition,
Bernoulli normalization, Mahler measure formula).
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .abelian import bernoulli_flow, finite_flow, lattice_flow, product_flow, subset_trajectory_sizes
from .errors import EntropyError
from .estimate import count_estimate
from .exact import RatMatrix
from .functors import (bernoulli_measure, h_alg, partition_semilattice, span_subset, subgroup_semilattice,
                       subset_semilattice, sumset_semigroup, CylinderPartition)
from .mahler import ayf_addition_check, ayf_entropy
from .models import free_semigroup, index_shift, multiply_by, naturals, word
from .semigroup import (NormedSemigroupModel, SemigroupEndomorphism, bernoulli_shift, coproduct_endomorphism,
                        coproduct_model, identity_endomorphism, norm_sequence, product_endomorphism,
                        product_model, semigroup_entropy, semigroup_entropy_at, single_coordinate, trajectory)
from .setmaps import successor, swap

EPS = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    clause: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = f" [{self.clause}]" if self.clause else ""
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}{tag}: {self.detail}"


@dataclass
class CatalogEntry:
    name: str
    model: NormedSemigroupModel
    phi: SemigroupEndomorphism
    family: list
    budget: int = 12


def model_catalog() -> list[CatalogEntry]:
    fb = bernoulli_flow(2)
    sub, beta = subgroup_semilattice(fb)
    z = lattice_flow([[2]])
    sums, dbl = sumset_semigroup(z)
    parts, pull = partition_semilattice(bernoulli_measure([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]))
    bnd, bshift = bernoulli_shift(naturals("bounded", bound=7), "right")
    return [
        CatalogEntry("naturals/id", naturals("id"), identity_endomorphism(), [1, 2, 5]),
        CatalogEntry("naturals/digits x2", naturals("digits"), multiply_by(2), [1, 3, 5]),
        CatalogEntry("naturals/log1p id", naturals("log1p"), identity_endomorphism(), [1, 4]),
        CatalogEntry("naturals/bounded id", naturals("bounded"), identity_endomorphism(), [1, 3]),
        CatalogEntry("words/ascent shift", free_semigroup("ascent"), index_shift(1), [word(0), word(0, 1), word(2, 0)]),
        CatalogEntry("words/unit-run shift", free_semigroup("unit_run"), index_shift(1), [word(0), word(1, 0)]),
        CatalogEntry("subsets/successor", subset_semilattice(), SemigroupEndomorphism(successor().image_set),
                     [frozenset({0}), frozenset({0, 3})]),
        CatalogEntry("subgroups/right shift Z_2", sub, beta, [(fb.basis_vector(0),), (fb.basis_vector(1),)], 10),
        CatalogEntry("sumsets/Z x2", sums, dbl, [frozenset({(0,), (1,)}), frozenset({(-1,), (0,), (1,)})], 9),
        CatalogEntry("partitions/Bernoulli", parts, pull, [CylinderPartition.coordinate(3)], 6),
        CatalogEntry("Bernoulli over bounded naturals", bnd, bshift, [single_coordinate(3, 0, 0)], 10),
    ]


def _traj(S, phi, x, n):
    t, p = x, x
    out = [t]
    for _ in range(n - 1):
        p = phi(p)
        t = S.op(t, p)
        out.append(t)
    return out


def check_subadditivity(entry: CatalogEntry) -> CheckResult:
    worst = -math.inf
    for x in entry.family:
        c = [entry.model.value(t) for t in _traj(entry.model, entry.phi, x, entry.budget)]
        for n in range(1, len(c)):
            for m in range(1, len(c) - n + 1):
                worst = max(worst, c[n + m - 1] - c[n - 1] - c[m - 1])
    return CheckResult(f"subadditivity {entry.name}", worst <= EPS, f"max c(n+m)-c(n)-c(m) = {worst:.3g}")


def check_norm_bound(entry: CatalogEntry) -> CheckResult:
    bad = []
    for x in entry.family:
        try:
            est = semigroup_entropy_at(entry.model, entry.phi, x, entry.budget)
        except EntropyError as exc:
            bad.append(f"{x!r}: {exc}")
            continue
        if est.value > entry.model.value(x) + EPS:
            bad.append(f"{x!r}: {est.value} > {entry.model.value(x)}")
    return CheckResult(f"h <= v(x) {entry.name}", not bad, "; ".join(bad) or f"{len(entry.family)} elements")


def _transpose01(A: frozenset) -> frozenset:
    return frozenset(1 - a if a < 2 else a for a in A)


def check_conjugation_sets() -> CheckResult:
    lam = successor()
    S = subset_semilattice()
    phi = SemigroupEndomorphism(lam.image_set)
    conj = SemigroupEndomorphism(lambda A: _transpose01(lam.image_set(_transpose01(A))))
    seeds = [frozenset({0}), frozenset({0, 2})]
    a = [norm_sequence(S, phi, x, 15) for x in seeds]
    b = [norm_sequence(S, conj, _transpose01(x), 15) for x in seeds]
    return CheckResult("conjugation invariance (subsets)", a == b, f"norm sequences equal: {a == b}")


def _unimodular(rng: random.Random) -> list[list[int]]:
    while True:
        U = [[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)]
        if abs(U[0][0] * U[1][1] - U[0][1] * U[1][0]) == 1:
            return U


def _mat(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _inv2(U):
    d = U[0][0] * U[1][1] - U[0][1] * U[1][0]
    return [[U[1][1] * d, -U[0][1] * d], [-U[1][0] * d, U[0][0] * d]]


def check_conjugation_lattice(rng: random.Random, trials: int = 10) -> CheckResult:
    ball = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    for _ in range(trials):
        A = [[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)]
        U = _unimodular(rng)
        B = _mat(_mat(U, A), _inv2(U))
        UF = [tuple(sum(U[i][k] * v[k] for k in range(2)) for i in range(2)) for v in ball]
        ca = subset_trajectory_sizes(lattice_flow(A), ball, 6)
        cb = subset_trajectory_sizes(lattice_flow(B), UF, 6)
        if ca != cb or abs(ayf_entropy(RatMatrix(A)) - ayf_entropy(RatMatrix(B))) > 1e-9:
            return CheckResult("conjugation invariance (Z^2)", False, f"A={A} U={U}: {ca} vs {cb}", "a")
    return CheckResult("conjugation invariance (Z^2)", True, f"{trials} random conjugates, equal trajectory sizes and Mahler values", "a")


def check_inversion(rng: random.Random, trials: int = 10) -> CheckResult:
    ball = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    for _ in range(trials):
        U = _unimodular(rng)
        ca = subset_trajectory_sizes(lattice_flow(U), ball, 6)
        cb = subset_trajectory_sizes(lattice_flow(_inv2(U)), ball, 6)
        if ca != cb:
            return CheckResult("inversion invariance (Z^2)", False, f"U={U}: {ca} vs {cb}")
    S = subset_semilattice()
    sw = swap()
    a = norm_sequence(S, SemigroupEndomorphism(sw.image_set), frozenset({0}), 8)
    b = norm_sequence(S, SemigroupEndomorphism(sw.preimage_set), frozenset({0}), 8)
    ok = a == b
    return CheckResult("inversion invariance", ok, f"{trials} unimodular automorphisms and a finite permutation")


def check_logarithmic_law() -> list[CheckResult]:
    out = []
    S = subset_semilattice()
    phi = SemigroupEndomorphism(successor().image_set)
    fb = bernoulli_flow(2)
    sub, beta = subgroup_semilattice(fb)
    for name, model, f, x in [("subsets/successor", S, phi, frozenset({0})),
                              ("subgroups/right shift", sub, beta, (fb.basis_vector(0),))]:
        for k in (2, 3):
            base = semigroup_entropy_at(model, f, x, 12).value
            tk = trajectory(model, f, x, k)
            power = semigroup_entropy_at(model, f.power(k), tk, 10).value
            out.append(CheckResult(f"logarithmic law equality {name} k={k}", abs(power - k * base) < 1e-9,
                                   f"h(phi^{k}) = {power:.9g}, {k} h(phi) = {k * base:.9g}"))
    D = naturals("digits")
    base = semigroup_entropy(D, multiply_by(2), [1, 3], 14).value
    for k in (2, 3):
        power = semigroup_entropy(D, multiply_by(2).power(k), [1, 3], 14).value
        out.append(CheckResult(f"logarithmic law inequality digits k={k}", power <= k * base + EPS,
                               f"{power:.6g} <= {k * base:.6g}"))
    return out


def check_weak_addition() -> list[CheckResult]:
    D = naturals("digits")
    S = subset_semilattice()
    s_phi = SemigroupEndomorphism(successor().image_set)
    d_phi = multiply_by(2)
    x1, x2 = 1, frozenset({0, 1})
    h1 = semigroup_entropy_at(D, d_phi, x1, 14).value
    h2 = semigroup_entropy_at(S, s_phi, x2, 14).value
    P = product_model(D, S)
    hp = semigroup_entropy_at(P, product_endomorphism(d_phi, s_phi), (x1, x2), 14).value
    C = coproduct_model([D, S])
    hc = semigroup_entropy_at(C, coproduct_endomorphism([d_phi, s_phi]), (x1, x2), 14).value
    return [
        CheckResult("weak addition (product = max)", abs(hp - max(h1, h2)) < 1e-9, f"{hp} vs max({h1}, {h2})"),
        CheckResult("weak addition (coproduct = sum)", abs(hc - (h1 + h2)) < 1e-9, f"{hc} vs {h1} + {h2}"),
    ]


def check_bernoulli_normalization() -> list[CheckResult]:
    M = naturals("bounded", bound=7)
    family = [single_coordinate(x, 0, 0) for x in range(10)]
    right = semigroup_entropy(*bernoulli_shift(M, "right"), family, 12)
    left = semigroup_entropy(*bernoulli_shift(M, "left"), family, 12)
    return [
        CheckResult("Bernoulli normalization (right = sup v)", right.is_exact and abs(right.value - 7) < 1e-9,
                    f"{right.verdict.value} {right.value}"),
        CheckResult("Bernoulli normalization (left = 0)", left.is_exact and left.value == 0,
                    f"{left.verdict.value} {left.value}"),
    ]


# ---------------------------------------------------------------------------
# characterizing properties of algebraic entropy on abelian groups
# ---------------------------------------------------------------------------


def check_direct_limits() -> CheckResult:
    """Left shift: union of the invariant finite pieces, each of entropy 0, and the whole also 0.
    Upper-triangular Q^3 maps: leading invariant blocks give a nondecreasing chain ending at the full value."""
    left = bernoulli_flow(2, "left")
    whole = h_alg(left, [sorted(span_subset(left, [left.basis_vector(i) for i in range(k)])) for k in (1, 2, 3)], 8)
    pieces = []
    for k in (1, 2, 3, 4):
        piece = finite_flow([2] * k, [[int(j == i + 1) for j in range(k)] for i in range(k)])
        pieces.append(h_alg(piece, [sorted(span_subset(piece, [piece.basis_vector(i) for i in range(k)]))], 8).value)
    ok = whole.value == 0 and all(p == 0 for p in pieces)
    A = [[2, 1, 0], [0, 3, 1], [0, 0, Fraction(1, 2)]]
    chain = [ayf_entropy(RatMatrix([row[:k] for row in A[:k]])) for k in (1, 2, 3)]
    ok = ok and all(b >= a - 1e-12 for a, b in zip(chain, chain[1:])) and abs(chain[-1] - ayf_entropy(RatMatrix(A))) < 1e-12
    return CheckResult("continuity on direct limits", ok, f"left shift pieces {pieces}, chain {[round(c, 9) for c in chain]}", "b")


def check_addition(rng: random.Random, trials: int = 20) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        d = p + q
        A = [[Fraction(rng.randint(-5, 5)) if (i < p or j >= p) else Fraction(0) for j in range(d)] for i in range(d)]
        worst = max(worst, ayf_addition_check(RatMatrix(A), p).difference)
    both = product_flow(bernoulli_flow(2), bernoulli_flow(2))
    gens = [both.basis_vector(0), both.basis_vector(1)]
    joint = h_alg(both, [sorted(span_subset(both, gens))], 6)
    ok = worst < 1e-7 and joint.is_exact and abs(joint.value - math.log(4)) < 1e-12
    return CheckResult("addition", ok, f"max block discrepancy {worst:.2e}; product of shifts {joint.value:.12g}", "c")


def check_bernoulli_values() -> CheckResult:
    vals = []
    for m in (2, 3, 4):
        b = bernoulli_flow(m)
        est = h_alg(b, [sorted(span_subset(b, [b.basis_vector(0)]))], 8)
        vals.append(est.is_exact and abs(est.value - math.log(m)) < 1e-12)
    return CheckResult("Bernoulli shift values log|K|", all(vals), f"K = Z_2, Z_3, Z_4: {vals}", "d")


def check_mahler_formula() -> CheckResult:
    ok, parts = True, []
    for m in (2, 3, 4):
        F = [(k,) for k in range(-m, m + 1)]
        est = count_estimate(subset_trajectory_sizes(lattice_flow([[m]]), F, 8))
        ayf = ayf_entropy([[m]])
        ok = ok and est.is_exact and abs(est.value - ayf) < 1e-12
        parts.append(f"{m}: {est.value:.9g}/{ayf:.9g}")
    return CheckResult("Mahler measure formula", ok, ", ".join(parts), "e")


def run_battery(seed: int = 0) -> list[CheckResult]:
    rng = random.Random(seed)
    checks: list[tuple[str, Callable[[], CheckResult | list[CheckResult]]]] = []
    for entry in model_catalog():
        checks.append((f"subadditivity {entry.name}", lambda e=entry: check_subadditivity(e)))
        checks.append((f"h <= v(x) {entry.name}", lambda e=entry: check_norm_bound(e)))
    checks += [
        ("conjugation invariance (subsets)", check_conjugation_sets),
        ("conjugation invariance (Z^2)", lambda: check_conjugation_lattice(rng)),
        ("inversion invariance", lambda: check_inversion(rng)),
        ("logarithmic law", check_logarithmic_law),
        ("weak addition", check_weak_addition),
        ("Bernoulli normalization", check_bernoulli_normalization),
        ("continuity on direct limits", check_direct_limits),
        ("addition", lambda: check_addition(rng)),
        ("Bernoulli shift values log|K|", check_bernoulli_values),
        ("Mahler measure formula", check_mahler_formula),
    ]
    results = []
    for name, check in checks:
        t0 = time.perf_counter()
        try:
            out = check()
        except EntropyError as exc:
            out = CheckResult(name, False, f"raised {type(exc).__name__}: {exc}")
        out = out if isinstance(out, list) else [out]
        dt = time.perf_counter() - t0
        for r in out:
            r.seconds = dt / len(out)
        results += out
    return results
