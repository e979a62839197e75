"""Growth functions of flows and their classification.

``gamma(n) = |F · phi(F) · ... · phi^(n-1)(F)|`` for a finite subset ``F``.
A verdict is taken from an exact linear recurrence when one is found;
otherwise from local slopes over the last few terms.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .abelian import DirectSumGroupFlow, lattice_flow, subset_trajectory_sizes
from .errors import DomainError, ResourceError, UnsupportedEndomorphism
from .estimate import EntropyEstimate, Verdict, count_estimate, find_recurrence, _dominant_root
from .exact import RatMatrix, SubgroupLattice, smith_normal_form
from .freegroup import FreeGroupFlow, multiply, inverse
from .mahler import ayf_entropy

GROWTH_CAP = 2 * 10**5


@dataclass
class GrowthThresholds:
    window: int = 5
    exponential_spread: float = 0.01   # last increments of log gamma
    polynomial_spread: float = 0.05    # last local log-log slopes
    flat_slope: float = 0.1            # |d log(rate) / d log n| below this reads as exponential
    envelope_base: float = 2 ** 0.9


@dataclass
class GrowthSample:
    flow_name: str
    F: list
    values: list[int]
    degree_fit: tuple[float, float]    # (slope of log gamma on log n, rms residual)
    base_fit: tuple[float, float]      # (exp of slope of log gamma on n, rms residual)
    truncated: bool = False

    @property
    def N(self) -> int:
        return len(self.values)


@dataclass
class GrowthVerdict:
    kind: str                          # Polynomial | Exponential | Intermediate-candidate | Inconclusive
    parameter: float | None = None
    window: tuple[int, int] = (0, 0)
    evidence: str = ""

    def __str__(self):
        if self.kind == "Polynomial":
            return f"Polynomial({int(self.parameter)})"
        if self.kind == "Exponential":
            return f"Exponential({self.parameter:.6g})"
        return self.kind


def _fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    if len(x) < 2:
        return math.nan, math.nan
    coef = np.polyfit(x, y, 1)
    resid = np.asarray(y) - np.polyval(coef, x)
    return float(coef[0]), float(math.sqrt(np.mean(resid ** 2)))


def make_sample(values: Sequence[int], flow_name: str = "", F: Sequence = (), truncated: bool = False) -> GrowthSample:
    values = [int(v) for v in values]
    if min(values) < 1:
        raise DomainError("growth values must be positive")
    half = max(2, len(values) // 2)
    ns = list(range(half, len(values) + 1))
    logs = [math.log(values[n - 1]) for n in ns]
    deg = _fit([math.log(n) for n in ns], logs)
    slope, res = _fit(ns, logs)
    return GrowthSample(flow_name, list(F), values, deg, (math.exp(slope), res), truncated)


def growth_sequence(flow, F: Sequence, N: int, cap: int = GROWTH_CAP, allow_truncation: bool = False) -> GrowthSample:
    """Exact ``gamma(1..N)``.  With ``allow_truncation`` a cap hit returns the
    computed prefix (at least 6 terms) instead of raising."""
    if N < 3:
        raise DomainError("N must be at least 3")
    F = list(F)
    if not F:
        raise DomainError("F must be nonempty")
    try:
        values = subset_trajectory_sizes(flow, F, N, cap=cap)
        truncated = False
    except ResourceError as exc:
        if not allow_truncation or len(exc.partial) < 6:
            raise
        values, truncated = list(exc.partial), True
    for v in values:
        if v < len(set(map(flow.canonical, F))):
            raise DomainError("gamma dropped below |F|")
    return make_sample(values, getattr(flow, "name", ""), F, truncated)


def _spread(xs: Sequence[float]) -> float:
    return max(xs) - min(xs)


def classify_growth(sample: GrowthSample | Sequence[int], tolerance: float = 1e-9,
                    thresholds: GrowthThresholds | None = None) -> GrowthVerdict:
    if not isinstance(sample, GrowthSample):
        sample = make_sample(sample)
    th = thresholds or GrowthThresholds()
    g = sample.values
    N = len(g)
    if N < 6:
        raise DomainError("classification needs at least 6 terms")
    conn = find_recurrence(g)
    if conn is not None:
        rho, exact_rho, mult = _dominant_root(conn)
        if abs(rho - 1) <= tolerance or exact_rho == 1:
            return GrowthVerdict("Polynomial", mult - 1, (1, N), f"linear recurrence, root 1 of multiplicity {mult}")
        if rho > 1:
            return GrowthVerdict("Exponential", float(exact_rho) if exact_rho else rho, (1, N),
                                 "linear recurrence with dominant root > 1")

    logs = [math.log(v) for v in g]
    w = min(th.window, N - 1)
    inc = [logs[n] - logs[n - 1] for n in range(N - w, N)]
    ratio = [logs[n - 1] / math.log(n) for n in range(N - w + 1, N + 1) if n > 1]
    # slopes over two adjacent windows covering the second half
    h, q = N // 2, (N // 2 + N) // 2
    early, late = range(h, q + 1), range(q, N + 1)

    def slopes(ns):
        ys = [logs[n - 1] for n in ns]
        return _fit(list(ns), ys)[0], _fit([math.log(n) for n in ns], ys)[0]

    rate1, deg1 = slopes(early)
    rate2, deg2 = slopes(late)
    positive = min(inc) > tolerance and rate1 > tolerance and rate2 > tolerance
    flat = positive and abs(math.log(rate2 / rate1) / math.log((N + q) / (q + h))) < th.flat_slope
    exponential = flat and _spread(inc) <= th.exponential_spread
    polynomial = _spread(ratio) <= th.polynomial_spread and abs(deg2 - deg1) <= th.polynomial_spread
    window = (h, N)
    if exponential and polynomial:
        return GrowthVerdict("Inconclusive", None, window, "both fits accepted")
    if exponential:
        return GrowthVerdict("Exponential", math.exp(rate2), window, "stable log increments")
    if polynomial:
        return GrowthVerdict("Polynomial", round(deg2), window, "stable log-log slopes")
    below = logs[-1] < N * math.log(th.envelope_base)
    if deg2 > deg1 + th.polynomial_spread and below and not flat:
        return GrowthVerdict("Intermediate-candidate", None, window,
                             "log-log slope still rising, below the exponential envelope")
    return GrowthVerdict("Inconclusive", None, window, "no fit accepted")


def growth_csv(sample: GrowthSample) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "gamma", "log_gamma_over_n", "log_gamma_over_log_n"])
    for n, v in enumerate(sample.values, start=1):
        lg = math.log(v)
        w.writerow([n, v, f"{lg / n:.12g}", f"{lg / math.log(n):.12g}" if n > 1 else ""])
    return buf.getvalue()


@dataclass
class GrowthReport:
    entropy: EntropyEstimate
    verdict: GrowthVerdict
    consistent: bool | None      # None when the iff is not tested


def alg_entropy_vs_growth(flow, F: Sequence, N: int, cap: int = GROWTH_CAP) -> GrowthReport:
    """Positive trajectory entropy should go with exponential growth and zero with polynomial."""
    sample = growth_sequence(flow, F, N, cap=cap, allow_truncation=True)
    est = count_estimate(sample.values)
    verdict = classify_growth(sample)
    consistent = None
    if est.verdict is Verdict.EXACT and verdict.kind in ("Polynomial", "Exponential"):
        consistent = (est.value > 1e-12) == (verdict.kind == "Exponential")
    return GrowthReport(est, verdict, consistent)


# ---------------------------------------------------------------------------
# generating sets and uniform rate
# ---------------------------------------------------------------------------


def declared_generators(flow, count: int = 4) -> list:
    if isinstance(flow, FreeGroupFlow):
        return flow.generators()
    if flow.finite:
        return [flow.basis_vector(i) for i in range(len(flow.moduli))]
    return [flow.basis_vector(i) for i in range(count)]


def _orbit(flow, F, budget: int) -> list:
    out, layer = [], [flow.canonical(x) for x in F]
    for _ in range(budget):
        out += layer
        layer = [flow.apply(x) for x in layer]
    return out


def missing_generators(flow, F: Sequence, budget: int = 12, word_cap: int = 20000) -> list:
    """Declared generators not reached by closing ``F`` under the flow and the group operations."""
    targets = declared_generators(flow)
    orbit = _orbit(flow, F, budget)
    if isinstance(flow, FreeGroupFlow):
        gens = {w for w in orbit if w} | {inverse(w) for w in orbit if w}
        seen, frontier = {()}, [()]
        while frontier and len(seen) < word_cap:
            nxt = []
            for u in frontier:
                for g in gens:
                    v = multiply(u, g)
                    if v not in seen and len(v) <= budget:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return [t for t in targets if t not in seen]
    width = max([len(v) for v in orbit + targets] + [1])
    moduli = [flow.modulus(i) or 0 for i in range(width)]
    if any(m is None for m in (flow.modulus(i) for i in range(width))):
        raise UnsupportedEndomorphism("generation check needs a group over Z or Z_m")
    lat = SubgroupLattice(moduli, [list(v) for v in orbit])
    return [t for t in targets if not lat.contains(list(t))]


@dataclass
class UniformRateReport:
    lower: float
    upper: float
    members: list = field(default_factory=list)   # (F, EntropyEstimate)


def uniform_rate(flow, family: Sequence[Sequence], N: int, budget: int = 12, cap: int = GROWTH_CAP) -> UniformRateReport:
    """Minimum over generating sets of the trajectory entropy: an upper bound on the uniform rate."""
    members = []
    for F in family:
        missing = missing_generators(flow, F, budget)
        if missing:
            raise DomainError(f"set does not generate the flow; missing {missing}")
        values = subset_trajectory_sizes(flow, F, N, cap=cap)
        members.append((list(F), count_estimate(values)))
    if not members:
        raise DomainError("empty generating family")
    return UniformRateReport(0.0, min(e.value for _, e in members), members)


# ---------------------------------------------------------------------------
# growth rate of a single element
# ---------------------------------------------------------------------------


def _length_function(flow, X: Sequence):
    if isinstance(flow, FreeGroupFlow):
        basis = set(flow.symmetric_generators(with_identity=False))
        if {flow.canonical(x) for x in X if flow.canonical(x)} | {inverse(flow.canonical(x)) for x in X} != basis:
            raise UnsupportedEndomorphism("word length is implemented for the free basis only")
        return len
    if not flow.finite or any(flow.modulus(i) != 0 for i in range(len(flow.moduli))):
        raise UnsupportedEndomorphism("element growth is implemented for Z^d and free groups")
    d = len(flow.moduli)
    vecs = sorted({flow.canonical(x) for x in X if any(flow.canonical(x))})
    halves = []
    for v in vecs:
        if tuple(-a for a in v) not in halves:
            halves.append(v)
    if len(halves) != d or set(vecs) != set(halves) | {tuple(-a for a in v) for v in halves}:
        raise UnsupportedEndomorphism("word length on Z^d is implemented for symmetric bases")
    B = RatMatrix([[halves[j][i] for j in range(d)] for i in range(d)])
    try:
        Binv = B.inverse()
    except Exception as exc:
        raise DomainError("X is not a basis") from exc
    if any(Binv[i, j].denominator != 1 for i in range(d) for j in range(d)):
        raise DomainError("X is not a basis of Z^d")

    def length(y):
        return sum(abs(sum(Binv[i, j] * y[j] for j in range(d))) for i in range(d))

    return length


def growth_rate_element(flow, x, X: Sequence, N: int) -> EntropyEstimate:
    """Exponential rate of ``len_X(phi^n(x))``."""
    length = _length_function(flow, X)
    x = flow.canonical(x)
    lengths = []
    for _ in range(N):
        x = flow.apply(x)
        lengths.append(int(length(x)))
    if 0 in lengths:
        est = EntropyEstimate([], Verdict.EXACT, 0.0, 0.0, counts=lengths, note="orbit reaches the identity")
        return est
    return count_estimate(lengths)


# ---------------------------------------------------------------------------
# dichotomy experiment
# ---------------------------------------------------------------------------


def symmetric_ball(d: int) -> list[tuple]:
    out = [(0,) * d]
    for i in range(d):
        for s in (1, -1):
            out.append(tuple(s if j == i else 0 for j in range(d)))
    return out


def random_lattice_corpus(count: int = 100, d: int = 2, entries: int = 3, seed: int = 0) -> list[DirectSumGroupFlow]:
    rng = random.Random(seed)
    return [lattice_flow([[rng.randint(-entries, entries) for _ in range(d)] for _ in range(d)], name=f"random#{k}")
            for k in range(count)]


def unipotent_corpus(count: int = 20, entries: int = 3, seed: int = 0) -> list[DirectSumGroupFlow]:
    rng = random.Random(seed)
    return [lattice_flow([[1, rng.randint(-entries, entries)], [0, 1]], name=f"unipotent#{k}") for k in range(count)]


def diagonal_corpus(count: int = 20, top: int = 4, seed: int = 0) -> list[DirectSumGroupFlow]:
    rng = random.Random(seed)
    return [lattice_flow([[rng.randint(2, top), 0], [0, rng.randint(2, top)]], name=f"diagonal#{k}") for k in range(count)]


@dataclass
class DichotomyReport:
    verdicts: list          # (flow name, GrowthVerdict, values)
    intermediate: list      # reproducers: (flow name, matrix, values)

    def counts(self) -> dict:
        out: dict = {}
        for _, v, _ in self.verdicts:
            out[v.kind] = out.get(v.kind, 0) + 1
        return out


def dichotomy_experiment(corpus: Sequence[DirectSumGroupFlow], N: int = 12, cap: int = 20000) -> DichotomyReport:
    """Classify the growth of each flow from the symmetric unit ball; collect any intermediate candidates."""
    verdicts, flagged = [], []
    for flow in corpus:
        F = symmetric_ball(len(flow.moduli)) if flow.finite else [flow.zero(), flow.basis_vector(0)]
        sample = growth_sequence(flow, F, N, cap=cap, allow_truncation=True)
        v = classify_growth(sample)
        verdicts.append((flow.name, v, sample.values))
        if v.kind == "Intermediate-candidate":
            flagged.append((flow.name, flow.matrix(), sample.values))
    return DichotomyReport(verdicts, flagged)


def lattice_entropy(flow: DirectSumGroupFlow) -> float:
    """Algebraic entropy of ``x -> A x`` on ``Z^d`` via the Mahler measure."""
    return ayf_entropy(RatMatrix(flow.matrix()))


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _injective_quotient(A: list[list[int]]) -> tuple[list, list]:
    """Projection ``P`` onto ``Z^d / ker(A^d)`` and the induced matrix there.

    The generalized kernel is saturated and invariant, so the quotient is a
    lattice on which the induced map is injective.
    """
    d = len(A)
    M = [row[:] for row in A]
    for _ in range(d - 1):
        M = _matmul(M, A)
    snf = smith_normal_form(M)
    kernel = [[snf.V[i][j] for j in range(snf.rank, d)] for i in range(d)]
    r = d - snf.rank
    if r == 0:
        return _identity_rows(d), [row[:] for row in A]
    if r == d:
        return [], []
    W = smith_normal_form(kernel).U
    W_inv = RatMatrix(W).inverse()
    W_inv = [[int(W_inv[i, j]) for j in range(d)] for i in range(d)]
    conj = _matmul(_matmul([list(row) for row in W], A), W_inv)
    P = [list(W[i]) for i in range(r, d)]
    return P, [row[r:] for row in conj[r:]]


def _identity_rows(d: int) -> list:
    return [[int(i == j) for j in range(d)] for i in range(d)]


@dataclass
class ResidueBound:
    value: float
    counts: list      # distinct classes of T_k modulo A'^k, k = 1, 2, ...
    quotient_rank: int


def residue_lower_bound(matrix: Sequence[Sequence[int]], F: Sequence, n: int,
                        cap: int = GROWTH_CAP) -> ResidueBound:
    """Certified lower bound for ``H_alg(x -> A x, F)`` on ``Z^d``.

    If ``R`` is a set of representatives in ``T_k`` of distinct classes
    modulo ``A^k`` and ``A`` is injective, the sums
    ``r_0 + A^k r_1 + ... + A^(k(m-1)) r_(m-1)`` are pairwise distinct and
    lie in ``T_km``, so ``H >= log|R| / k``.  A singular matrix is first
    pushed to the quotient by its generalized kernel, which can only lower
    the entropy.
    """
    A = [[int(x) for x in row] for row in matrix]
    P, B = _injective_quotient(A)
    if not P:
        return ResidueBound(0.0, [], 0)
    e = len(B)
    T = {tuple(int(x) for x in f) for f in F}
    F_set = set(T)
    power = [row[:] for row in B]
    best, counts = 0.0, []
    for k in range(1, n + 1):
        snf = smith_normal_form(power)
        classes = set()
        for t in T:
            y = [sum(p * x for p, x in zip(row, t)) for row in P]
            u = [sum(a * b for a, b in zip(row, y)) for row in snf.U]
            classes.add(tuple(u[i] % snf.factors[i] for i in range(e)))
        counts.append(len(classes))
        best = max(best, math.log(len(classes)) / k)
        if k == n:
            break
        T = {tuple(f[i] + sum(a * b for a, b in zip(A[i], t)) for i in range(len(A)))
             for f in F_set for t in T}
        if len(T) > cap:
            break
        power = _matmul(power, B)
    return ResidueBound(best, counts, e)


def residue_system(matrix: Sequence[Sequence[int]]) -> list[tuple]:
    """Coset representatives of ``Z^d / A Z^d`` for a nonsingular integer ``A``."""
    A = [[int(x) for x in row] for row in matrix]
    snf = smith_normal_form(A)
    if snf.rank < len(A):
        raise DomainError("singular matrix has infinitely many residue classes")
    d = len(A)
    U_inv = RatMatrix(snf.U).inverse()
    reps = [()]
    for f in snf.factors:
        reps = [r + (a,) for r in reps for a in range(f)]
    return [tuple(int(sum(U_inv[i, j] * v[j] for j in range(d))) for i in range(d)) for v in reps]
