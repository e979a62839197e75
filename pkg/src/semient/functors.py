"""Entropy front-ends: each one builds a normed semilattice or semigroup
from a dynamical system and measures trajectories in it.

==================  =========================  ==================================
entropy             elements                   norm
==================  =========================  ==================================
set_entropy         finite subsets, union      cardinality (images under lam)
set_entropy_star    finite subsets, union      cardinality (preimages under lam)
ent                 finite subgroups, sum      log of the order
h_alg               finite subsets, sumset     log of the cardinality
ent_star            finite-index subgroups, ∩  log of the index
h_top_profinite     open subgroups, ∩          log of the index
h_top_finite_space  open covers, join          log of the least subcover size
h_mes_symbolic      cylinder partitions, join  Boltzmann entropy
ent_dim             subspaces, sum             dimension
==================  =========================  ==================================
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .abelian import DirectSumGroupFlow, FiniteSubgroup, subgroup_trajectory_orders, subset_trajectory_sizes
from .duality import CompactFlow
from .errors import DomainError, PropertyViolation, ResourceError
from .estimate import EntropyEstimate, count_estimate, family_estimate, fekete_estimate
from .exact import SubgroupLattice
from .functionals import FiniteIndexSubgroup, Row, cotrajectory_indices, index_of_rows
from .semigroup import NormedSemigroupModel, SemigroupEndomorphism, semigroup_entropy
from .setmaps import SetSelfMap

DEFAULT_CAP = 10**7


def _bounded(est: EntropyEstimate, norm: float, what: str) -> EntropyEstimate:
    if est.value > norm + 1e-9:
        raise PropertyViolation(f"{what}: entropy {est.value} exceeds the norm {norm}")
    return est


def _family(members: list, what: str) -> EntropyEstimate:
    if not members:
        raise DomainError(f"empty {what} family")
    return family_estimate(members)


# ---------------------------------------------------------------------------
# sets
# ---------------------------------------------------------------------------


def subset_semilattice() -> NormedSemigroupModel:
    return NormedSemigroupModel(
        op=frozenset.union, norm=len, identity=frozenset(), name="finite subsets",
        claims_s_monotone=True, commutative=True, size=len,
    )


def image_map(lam: SetSelfMap) -> SemigroupEndomorphism:
    return SemigroupEndomorphism(lam.image_set, True, f"image[{lam.name}]")


def preimage_map(lam: SetSelfMap) -> SemigroupEndomorphism:
    if not lam.finitely_many_to_one():
        raise DomainError(f"{lam.name} has an infinite fiber")
    return SemigroupEndomorphism(lam.preimage_set, False, f"preimage[{lam.name}]")


def set_entropy(lam: SetSelfMap, seeds: Iterable, budget: int = 20) -> EntropyEstimate:
    """Growth of ``|A ∪ lam(A) ∪ ... ∪ lam^(n-1)(A)|`` per step."""
    seeds = [frozenset(a) for a in seeds]
    return semigroup_entropy(subset_semilattice(), image_map(lam), seeds, budget)


def set_entropy_star(lam: SetSelfMap, seeds: Iterable, budget: int = 20) -> EntropyEstimate:
    """Growth of ``|A ∪ lam^-1(A) ∪ ... ∪ lam^-(n-1)(A)|`` per step."""
    seeds = [frozenset(a) for a in seeds]
    return semigroup_entropy(subset_semilattice(), preimage_map(lam), seeds, budget)


# ---------------------------------------------------------------------------
# discrete abelian groups
# ---------------------------------------------------------------------------


def subgroup_semilattice(flow: DirectSumGroupFlow) -> NormedSemigroupModel:
    """Finite subgroups of a torsion flow, encoded by canonical generators."""
    if not flow.is_torsion:
        raise DomainError("finite subgroups need a torsion flow")

    def canon(gens) -> tuple:
        vecs = [flow.canonical(g) for g in gens]
        w = max([1] + [len(v) for v in vecs]) if not flow.finite else len(flow.moduli)
        lat = SubgroupLattice([flow.modulus(i) for i in range(w)], [list(v) for v in vecs])
        return tuple(sorted(flow.canonical(g) for g in lat.generators()))

    def order(gens) -> int:
        return FiniteSubgroup(flow, gens).cardinality

    return NormedSemigroupModel(
        op=lambda a, b: canon(a + b), norm=order, identity=(), name=f"sub({flow.name})",
        claims_s_monotone=True, commutative=True, log_norm=True,
    ), SemigroupEndomorphism(lambda a: canon([flow.apply(g) for g in a]), True, flow.name)


def _generators(F) -> list:
    if isinstance(F, FiniteSubgroup):
        return list(F.generators)
    return list(F)


def ent(flow: DirectSumGroupFlow, family: Iterable, budget: int = 12, cap: int | None = None) -> EntropyEstimate:
    """Supremum over the family of the growth rate of ``log |F + phi(F) + ... |``."""
    members = []
    for F in family:
        gens = _generators(F)
        orders = subgroup_trajectory_orders(flow, gens, budget, cap=cap)
        members.append(_bounded(count_estimate(orders), math.log(orders[0]), "ent"))
    return _family(members, "subgroup")


def sumset_semigroup(flow) -> NormedSemigroupModel:
    """Finite nonempty subsets under the (not necessarily commutative) product set."""
    return NormedSemigroupModel(
        op=lambda A, B: frozenset(flow.op(a, b) for a in A for b in B), norm=len,
        name=f"subsets({getattr(flow, 'name', '')})", log_norm=True, size=len,
    ), SemigroupEndomorphism(lambda A: frozenset(flow.apply(a) for a in A), True, getattr(flow, "name", ""))


def span_subset(flow: DirectSumGroupFlow, generators) -> frozenset:
    """All elements of the finite subgroup generated by ``generators``."""
    return frozenset(FiniteSubgroup(flow, generators).elements())


def h_alg(flow, family: Iterable, budget: int = 10, left: bool = False, cap: int = DEFAULT_CAP) -> EntropyEstimate:
    """Supremum over finite subsets ``F`` of the growth rate of ``log |F · phi(F) · ... |``."""
    members = []
    for F in family:
        F = list(F)
        sizes = subset_trajectory_sizes(flow, F, budget, left=left, cap=cap)
        members.append(_bounded(count_estimate(sizes), math.log(sizes[0]), "h_alg"))
    return _family(members, "subset")


def ent_star(flow: DirectSumGroupFlow, family: Iterable[FiniteIndexSubgroup], budget: int = 8) -> EntropyEstimate:
    """Supremum over finite-index subgroups ``N`` of the growth rate of ``log [G : C_n(phi, N)]``."""
    members = []
    for N in family:
        indices, certified = cotrajectory_indices(flow, N, budget)
        est = count_estimate(indices)
        if not certified:
            est.note = "index stable under window doubling but not certified full rank"
        members.append(_bounded(est, math.log(indices[0]), "ent*"))
    return _family(members, "finite-index subgroup")


# ---------------------------------------------------------------------------
# compact side
# ---------------------------------------------------------------------------


def open_subgroup_indices(compact: CompactFlow, characters: Sequence[tuple], n: int) -> list[int]:
    """``[K : V ∩ psi^-1 V ∩ ... ]`` for ``V`` the common kernel of ``characters``.

    The index of a common kernel equals the order of the subgroup the
    characters generate; pulling ``V`` back pulls each character back.
    """
    table = compact.table
    layers = [[table.canonical(x) for x in characters]]
    for _ in range(n - 1):
        layers.append([compact.pullback_character(x) for x in layers[-1]])
    w = len(table.moduli) if table.finite else max([1] + [len(x) for layer in layers for x in layer])
    lattice = SubgroupLattice([table.modulus(i) for i in range(w)])
    out = []
    for layer in layers:
        for x in layer:
            lattice.add(list(x))
        out.append(lattice.order())
    return out


def h_top_profinite(compact: CompactFlow, open_family: Iterable, budget: int = 12) -> EntropyEstimate:
    """Topological entropy of a compact flow over basic open subgroups (given by characters)."""
    members = []
    for chars in open_family:
        indices = open_subgroup_indices(compact, _generators(chars), budget)
        members.append(_bounded(count_estimate(indices), math.log(indices[0]), "h_top"))
    return _family(members, "open subgroup")


def ent_compact(compact: CompactFlow, family: Iterable[Sequence[Row]], budget: int = 8) -> EntropyEstimate:
    """``ent`` of a compact flow over finite subgroups generated by characters given as rows."""
    members = []
    M = compact.modulus
    dim = compact.table.dimension
    for rows in family:
        layers = [list(rows)]
        for _ in range(budget - 1):
            layers.append([compact.apply_row(r) for r in layers[-1]])
        top = index_of_rows([r for layer in layers for r in layer], M, dim)
        lattice = SubgroupLattice([M] * top.window)
        orders = []
        for layer in layers:
            for r in layer:
                lattice.add(r.values(top.window))
            orders.append(lattice.order())
        members.append(_bounded(count_estimate(orders), math.log(orders[0]), "ent(dual)"))
    return _family(members, "character")


# ---------------------------------------------------------------------------
# finite topological spaces
# ---------------------------------------------------------------------------


class FiniteSpace:
    """Points ``0..n-1`` with the specialization preorder ``x <= y`` iff ``x`` lies in the closure of ``y``.

    Open sets are the up-closed sets.
    """

    def __init__(self, n: int, relations: Iterable[tuple[int, int]] = ()):
        self.n = n
        leq = [[i == j for j in range(n)] for i in range(n)]
        for x, y in relations:
            leq[x][y] = True
        for k in range(n):  # transitive closure
            for i in range(n):
                if leq[i][k]:
                    for j in range(n):
                        if leq[k][j]:
                            leq[i][j] = True
        self.leq = leq
        self.points = frozenset(range(n))

    def up(self, x: int) -> frozenset:
        return frozenset(y for y in range(self.n) if self.leq[x][y])

    def is_open(self, U) -> bool:
        return all(self.up(x) <= U for x in U)

    def opens(self) -> list[frozenset]:
        return [frozenset(c) for r in range(self.n + 1) for c in itertools.combinations(range(self.n), r)
                if self.is_open(frozenset(c))]

    def is_continuous(self, f: Sequence[int]) -> bool:
        return all(self.is_open(frozenset(x for x in range(self.n) if f[x] in self.up(y))) for y in range(self.n))


def sierpinski() -> FiniteSpace:
    """Two points; ``1`` is open and ``0`` is closed."""
    return FiniteSpace(2, [(0, 1)])


def chain_space(n: int = 3) -> FiniteSpace:
    return FiniteSpace(n, [(i, i + 1) for i in range(n - 1)])


def discrete_space(n: int) -> FiniteSpace:
    return FiniteSpace(n)


def min_subcover(X: FiniteSpace, cover: frozenset) -> int:
    members = [U for U in cover if U]
    for r in range(1, len(members) + 1):
        for combo in itertools.combinations(members, r):
            if frozenset().union(*combo) == X.points:
                return r
    raise DomainError("not a cover")


def cover_semilattice(X: FiniteSpace) -> NormedSemigroupModel:
    def join(U, V):
        return frozenset(u & v for u in U for v in V if u & v)

    return NormedSemigroupModel(
        op=join, norm=lambda U: min_subcover(X, U), identity=frozenset([X.points]),
        name="open covers", commutative=True, log_norm=True,
    )


def h_top_finite_space(X: FiniteSpace, f: Sequence[int], covers: Iterable, budget: int = 10) -> EntropyEstimate:
    """Topological entropy of a continuous self-map of a finite space, over the given open covers."""
    f = tuple(f)
    if len(f) != X.n or not X.is_continuous(f):
        raise DomainError("map is not a continuous self-map of the space")
    covers = [frozenset(frozenset(U) for U in c) for c in covers]
    for c in covers:
        if not all(X.is_open(U) for U in c) or frozenset().union(*c) != X.points:
            raise DomainError("family member is not an open cover")
    pull = SemigroupEndomorphism(lambda c: frozenset(p for p in (frozenset(x for x in X.points if f[x] in U) for U in c) if p))
    return semigroup_entropy(cover_semilattice(X), pull, covers, budget)


# ---------------------------------------------------------------------------
# symbolic measure-preserving systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarkovMeasure:
    """A stationary Markov measure on the one-sided full shift; Bernoulli when all rows of ``P`` agree."""

    initial: tuple
    transition: tuple

    def __post_init__(self):
        pi = tuple(Fraction(x) for x in self.initial)
        P = tuple(tuple(Fraction(x) for x in row) for row in self.transition)
        object.__setattr__(self, "initial", pi)
        object.__setattr__(self, "transition", P)
        k = len(pi)
        if any(len(row) != k for row in P) or len(P) != k:
            raise DomainError("transition matrix shape does not match the alphabet")
        if any(x < 0 for x in pi) or sum(pi) != 1:
            raise DomainError("initial distribution must be a probability vector")
        if any(any(x < 0 for x in row) or sum(row) != 1 for row in P):
            raise DomainError("transition rows must be probability vectors")
        if any(sum(pi[i] * P[i][j] for i in range(k)) != pi[j] for j in range(k)):
            raise DomainError("initial distribution is not stationary")

    @property
    def alphabet(self) -> int:
        return len(self.initial)

    def cylinder(self, word: Sequence[int]) -> Fraction:
        p = self.initial[word[0]]
        for a, b in zip(word, word[1:]):
            p *= self.transition[a][b]
        return p


def bernoulli_measure(p: Sequence) -> MarkovMeasure:
    p = tuple(Fraction(x) for x in p)
    return MarkovMeasure(p, tuple(p for _ in p))


def markov_measure(P: Sequence[Sequence], pi: Sequence) -> MarkovMeasure:
    return MarkovMeasure(tuple(pi), tuple(tuple(r) for r in P))


@dataclass(frozen=True)
class CylinderPartition:
    """A partition of the full shift into unions of cylinders of length ``length``.

    ``labels[w]`` is the block of the word ``w`` (words in lexicographic order).
    """

    length: int
    labels: tuple

    @classmethod
    def make(cls, length: int, labels: Sequence) -> "CylinderPartition":
        seen: dict = {}
        return cls(length, tuple(seen.setdefault(x, len(seen)) for x in labels))

    @classmethod
    def coordinate(cls, alphabet: int) -> "CylinderPartition":
        return cls.make(1, range(alphabet))

    @classmethod
    def trivial(cls) -> "CylinderPartition":
        return cls(0, (0,))


def _words(alphabet: int, length: int):
    return itertools.product(range(alphabet), repeat=length)


def partition_semilattice(mu: MarkovMeasure, max_words: int = 2 * 10**5):
    k = mu.alphabet

    def label(xi: CylinderPartition, w: tuple) -> int:
        idx = 0
        for a in w[: xi.length]:
            idx = idx * k + a
        return xi.labels[idx]

    def join(xi, eta):
        L = max(xi.length, eta.length)
        if k ** L > max_words:
            raise ResourceError(f"cylinder length {L} exceeds the word cap")
        return CylinderPartition.make(L, [(label(xi, w), label(eta, w)) for w in _words(k, L)])

    def shift_preimage(xi):
        L = xi.length + 1
        if k ** L > max_words:
            raise ResourceError(f"cylinder length {L} exceeds the word cap")
        return CylinderPartition.make(L, [label(xi, w[1:]) for w in _words(k, L)])

    def boltzmann(xi) -> float:
        mass: dict = {}
        for w in _words(k, xi.length):
            b = label(xi, w)
            mass[b] = mass.get(b, 0) + (mu.cylinder(w) if w else Fraction(1))
        return math.fsum(-float(p) * (math.log(p.numerator) - math.log(p.denominator)) for p in mass.values() if p)

    model = NormedSemigroupModel(
        op=join, norm=boltzmann, identity=CylinderPartition.trivial(), name="cylinder partitions",
        commutative=True, claims_s_monotone=True,
    )
    return model, SemigroupEndomorphism(shift_preimage, True, "shift preimage")


def h_mes_symbolic(mu: MarkovMeasure, partitions: Iterable[CylinderPartition], budget: int = 8,
                   tolerance: float = 1e-9) -> EntropyEstimate:
    """Measure entropy of the shift for ``mu`` over the given cylinder partitions."""
    partitions = list(partitions)
    for xi in partitions:
        if len(xi.labels) != mu.alphabet ** xi.length:
            raise DomainError(f"partition labels {len(xi.labels)} words, expected {mu.alphabet ** xi.length}")
    model, pull = partition_semilattice(mu)
    return semigroup_entropy(model, pull, partitions, budget, tolerance=tolerance)


def markov_entropy_rate(mu: MarkovMeasure) -> float:
    """Closed form ``-sum_i pi_i sum_j P_ij log P_ij``."""
    terms = []
    for i, pi in enumerate(mu.initial):
        for p in mu.transition[i]:
            if p:
                terms.append(-float(pi) * float(p) * math.log(p))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# vector spaces
# ---------------------------------------------------------------------------


def _rational_ranks(flow: DirectSumGroupFlow, vectors: list, n: int) -> list[int]:
    basis: dict[int, dict] = {}  # pivot -> sparse row with pivot entry 1

    def insert(v: tuple) -> None:
        v = {i: Fraction(a) for i, a in enumerate(v) if a}
        for p in sorted(basis):
            c = v.get(p)
            if c:
                for i, a in basis[p].items():
                    v[i] = v.get(i, 0) - c * a
                v = {i: a for i, a in v.items() if a}
        if v:
            piv = min(v)
            basis[piv] = {i: a / v[piv] for i, a in v.items()}

    ranks = []
    layer = [flow.canonical(v) for v in vectors]
    for _ in range(n):
        for v in layer:
            insert(v)
        ranks.append(len(basis))
        layer = [flow.apply(v) for v in layer]
    return ranks


def subspace_dimensions(flow: DirectSumGroupFlow, vectors: list, n: int) -> list[int]:
    """``dim (H + phi H + ... + phi^(k-1) H)`` for ``k = 1..n``."""
    if flow.is_rational:
        return _rational_ranks(flow, vectors, n)
    p = flow.modulus(0)
    if not flow.is_torsion or (flow.finite and len(set(flow.moduli)) > 1):
        raise DomainError("dimension entropy needs a vector space over one field")
    orders = subgroup_trajectory_orders(flow, vectors, n)
    dims = []
    for q in orders:
        d = 0
        while q % p == 0:
            q //= p
            d += 1
        if q != 1:
            raise PropertyViolation("subspace order is not a power of the field order")
        dims.append(d)
    return dims


def ent_dim(flow: DirectSumGroupFlow, family: Iterable, budget: int = 12) -> EntropyEstimate:
    """Supremum over finite-dimensional subspaces of the growth rate of ``dim T_n``."""
    members = []
    for H in family:
        dims = subspace_dimensions(flow, list(H), budget)
        members.append(_bounded(fekete_estimate(dims), dims[0], "ent_dim"))
    return _family(members, "subspace")
