"""Finite-index subgroups of torsion flows as kernels of functionals.

A functional on ``sum_j Z_{m_j}`` is determined by its values on the
generators, i.e. by a row ``(f_0, f_1, ...)`` with entries in ``Z_M``
where ``M`` is the exponent of the group.  Rows come in three kinds:

* ``PeriodicRow``: a finite prefix followed by a repeating block; finitely
  supported rows are the case ``block == (0,)``.
* ``RandomRow``: a seeded pseudo-random sequence, produced lazily.
* ``PulledBackRow``: ``f∘phi`` for a lazy row ``f``.

The index of ``ker f_1 ∩ ... ∩ ker f_r`` equals the order of the span of
the rows, computed on a finite window of coordinates.  For periodic rows
the window is exact.  Lazy rows are certified exact once the window span
is all of ``Z_M^r``; otherwise the window is doubled until the span stops
changing, which is reported as a stable (not certified) index.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import reduce

from .abelian import DirectSumGroupFlow, TailRule, finite_flow, scalar_flow
from .errors import DomainError, ResourceError, UnsupportedEndomorphism
from .exact import SubgroupLattice

MAX_WINDOW = 4096


class Row:
    modulus: int

    def values(self, length: int) -> list[int]:
        raise NotImplementedError

    def __getitem__(self, j: int) -> int:
        return self.values(j + 1)[j]


@dataclass(frozen=True, eq=False)
class PeriodicRow(Row):
    prefix: tuple
    block: tuple
    modulus: int

    def __post_init__(self):
        prefix, block = _canonical_periodic([x % self.modulus for x in self.prefix],
                                            [x % self.modulus for x in self.block] or [0])
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "block", block)

    @classmethod
    def finite(cls, values, modulus: int) -> "PeriodicRow":
        return cls(tuple(values), (0,), modulus)

    @classmethod
    def coordinate(cls, k: int, modulus: int, coefficient: int = 1) -> "PeriodicRow":
        return cls((0,) * k + (coefficient,), (0,), modulus)

    @property
    def window(self) -> int:
        """Coordinates after ``len(prefix) + len(block)`` repeat earlier ones."""
        return len(self.prefix) + len(self.block)

    def at(self, j: int) -> int:
        if j < len(self.prefix):
            return self.prefix[j]
        return self.block[(j - len(self.prefix)) % len(self.block)]

    def values(self, length: int) -> list[int]:
        return [self.at(j) for j in range(length)]

    def __getitem__(self, j: int) -> int:
        return self.at(j)

    def __eq__(self, other):
        return isinstance(other, PeriodicRow) and (self.prefix, self.block, self.modulus) == (
            other.prefix, other.block, other.modulus)

    def __hash__(self):
        return hash((self.prefix, self.block, self.modulus))

    def __repr__(self):
        return f"PeriodicRow({self.prefix}, {self.block}, mod {self.modulus})"


def _canonical_periodic(prefix: list, block: list) -> tuple[tuple, tuple]:
    q = len(block)
    for d in range(1, q + 1):
        if q % d == 0 and all(block[i] == block[i % d] for i in range(q)):
            block = block[:d]
            break
    while prefix and prefix[-1] == block[-1]:
        prefix.pop()
        block = [block[-1]] + block[:-1]
    return tuple(prefix), tuple(block)


class RandomRow(Row):
    """A reproducible pseudo-random row, extended on demand."""

    def __init__(self, seed: int, modulus: int):
        self.seed, self.modulus = seed, modulus
        self._rng = random.Random(seed)
        self._cache: list[int] = []

    def values(self, length: int) -> list[int]:
        while len(self._cache) < length:
            self._cache.append(self._rng.randrange(self.modulus))
        return self._cache[:length]

    def __repr__(self):
        return f"RandomRow(seed={self.seed}, mod {self.modulus})"


class PulledBackRow(Row):
    """``base∘phi`` for a flow ``phi``, evaluated lazily."""

    def __init__(self, base: Row, flow: DirectSumGroupFlow):
        self.base, self.flow, self.modulus = base, flow, base.modulus
        self._cache: list[int] = []

    def _reach(self, length: int) -> int:
        top = 0
        for j in range(length):
            for i in self.flow.image(j):
                top = max(top, i + 1)
        return top

    def values(self, length: int) -> list[int]:
        if len(self._cache) < length:
            base = self.base.values(self._reach(length))
            m = self.modulus
            self._cache = [sum(a * base[i] for i, a in self.flow.image(j).items()) % m for j in range(length)]
        return self._cache[:length]

    def __repr__(self):
        return f"PulledBackRow({self.base!r})"


# ---------------------------------------------------------------------------


def group_exponent(flow: DirectSumGroupFlow) -> int:
    if not flow.is_torsion:
        raise UnsupportedEndomorphism("functional rows are only handled on torsion flows")
    if flow.finite:
        return reduce(math.lcm, flow.moduli, 1)
    return flow.exponent


def check_row(flow: DirectSumGroupFlow, row: Row) -> None:
    """A row is a homomorphism when ``m_j f_j = 0`` in ``Z_M`` for every generator."""
    M = group_exponent(flow)
    if row.modulus != M:
        raise DomainError(f"row modulus {row.modulus} differs from the group exponent {M}")
    if flow.finite:
        for j, f in enumerate(row.values(len(flow.moduli))):
            if (flow.moduli[j] * f) % M:
                raise DomainError(f"row value {f} at generator {j} is not killed by its order {flow.moduli[j]}")


def preimage_functional(flow: DirectSumGroupFlow, f: Row) -> Row:
    """The row of ``f∘phi``."""
    M = group_exponent(flow)
    if f.modulus != M:
        raise DomainError("row modulus does not match the flow")
    if flow.finite:
        d = len(flow.moduli)
        values = f.values(d)
        out = [sum(a * values[i] for i, a in flow.image(j).items()) % M for j in range(d)]
        return PeriodicRow.finite(out, M)
    if not isinstance(f, PeriodicRow):
        return PulledBackRow(f, flow)
    tail = flow.effective_tail()
    c, s = tail.coefficient, tail.shift
    listed_top = max([j + 1 for j in flow.columns] + [0])
    j0 = max(tail.start, listed_top)
    onset = max(j0, len(f.prefix) - s, 0)
    prefix = [sum(a * f.at(i) for i, a in flow.image(j).items()) % M for j in range(onset)]
    block = [(c * f.at(onset + t + s)) % M for t in range(len(f.block))]
    return PeriodicRow(tuple(prefix), tuple(block), M)


def span_order(rows: list[Row], modulus: int, window: int) -> int:
    lattice = SubgroupLattice([modulus] * window)
    for r in rows:
        lattice.add(r.values(window))
    return lattice.order()


@dataclass
class IndexResult:
    index: int
    window: int
    exact: bool


def required_window(rows: list[Row]) -> int | None:
    """An exact window for periodic rows; ``None`` if some row is lazy."""
    if not all(isinstance(r, PeriodicRow) for r in rows):
        return None
    prefix = max([len(r.prefix) for r in rows] + [0])
    period = reduce(math.lcm, [len(r.block) for r in rows], 1)
    return prefix + period + len(rows)


def index_of_rows(rows: list[Row], modulus: int, finite_dim: int | None = None,
                  max_window: int = MAX_WINDOW) -> IndexResult:
    """``[G : ker rows]`` as the order of the row span."""
    if not rows:
        return IndexResult(1, 0, True)
    if finite_dim is not None:
        return IndexResult(span_order(rows, modulus, finite_dim), finite_dim, True)
    exact_window = required_window(rows)
    if exact_window is not None:
        return IndexResult(span_order(rows, modulus, exact_window), exact_window, True)
    full = modulus ** len(rows)
    window = 2 * len(rows) + 8
    previous = span_order(rows, modulus, window)
    while True:
        if previous == full:
            return IndexResult(previous, window, True)
        if 2 * window > max_window:
            raise ResourceError(f"row span still growing at window {window}", partial=[previous])
        window *= 2
        current = span_order(rows, modulus, window)
        if current == previous:
            return IndexResult(current, window, False)
        previous = current


class FiniteIndexSubgroup:
    """``N = ker f_1 ∩ ... ∩ ker f_r`` inside a torsion flow."""

    def __init__(self, flow: DirectSumGroupFlow, rows: list[Row]):
        self.flow = flow
        self.modulus = group_exponent(flow)
        self.rows = list(rows)
        for r in self.rows:
            check_row(flow, r)
        self._index: IndexResult | None = None

    @classmethod
    def coordinates(cls, flow: DirectSumGroupFlow, ks) -> "FiniteIndexSubgroup":
        M = group_exponent(flow)
        return cls(flow, [PeriodicRow.coordinate(k, M, M // flow.modulus(k)) for k in ks])

    @classmethod
    def random(cls, flow: DirectSumGroupFlow, count: int, seed: int = 0) -> "FiniteIndexSubgroup":
        if flow.finite:
            rng = random.Random(seed)
            M = group_exponent(flow)
            rows = [PeriodicRow.finite([(M // m) * rng.randrange(m) for m in flow.moduli], M) for _ in range(count)]
            return cls(flow, rows)
        return cls(flow, [RandomRow(seed * 1000 + i, flow.exponent) for i in range(count)])

    def index_result(self) -> IndexResult:
        if self._index is None:
            self._index = index_of_rows(self.rows, self.modulus, self.flow.dimension)
        return self._index

    @property
    def index(self) -> int:
        return self.index_result().index

    def contains(self, x: tuple) -> bool:
        return all(sum(a * r[j] for j, a in enumerate(x) if a) % self.modulus == 0 for r in self.rows)

    def intersect(self, other: "FiniteIndexSubgroup") -> "FiniteIndexSubgroup":
        return FiniteIndexSubgroup(self.flow, self.rows + other.rows)

    def preimage(self) -> "FiniteIndexSubgroup":
        return FiniteIndexSubgroup(self.flow, [preimage_functional(self.flow, r) for r in self.rows])


def cotrajectory_rows(flow: DirectSumGroupFlow, N: FiniteIndexSubgroup, n: int) -> list[list[Row]]:
    """Row layers ``f∘phi^j`` for ``j = 0..n-1``."""
    layers = [list(N.rows)]
    for _ in range(n - 1):
        layers.append([preimage_functional(flow, r) for r in layers[-1]])
    return layers


def cotrajectory(flow: DirectSumGroupFlow, N: FiniteIndexSubgroup, n: int) -> FiniteIndexSubgroup:
    """``C_n = N ∩ phi^-1(N) ∩ ... ∩ phi^-(n-1)(N)``."""
    if n < 1:
        raise DomainError("cotrajectory length must be positive")
    return FiniteIndexSubgroup(flow, [r for layer in cotrajectory_rows(flow, N, n) for r in layer])


def cotrajectory_indices(flow: DirectSumGroupFlow, N: FiniteIndexSubgroup, n: int) -> tuple[list[int], bool]:
    """``[G : C_k]`` for ``k = 1..n`` and whether every value is certified exact.

    The window is fixed by the largest cotrajectory, then rows are added
    one layer at a time.
    """
    layers = cotrajectory_rows(flow, N, n)
    all_rows = [r for layer in layers for r in layer]
    top = index_of_rows(all_rows, N.modulus, flow.dimension)
    lattice = SubgroupLattice([N.modulus] * top.window)
    out = []
    for layer in layers:
        for r in layer:
            lattice.add(r.values(top.window))
        out.append(lattice.order())
    return out, top.exact


def bounded_abelian_corpus(count: int = 100, seed: int = 0) -> list[DirectSumGroupFlow]:
    """Random flows on groups of exponent 2, 3, 4 or 6.

    Cycles through finite matrix flows, scalar flows on the infinite sum,
    and shifts by +1, -1 and +-2 carrying a unit coefficient behind a few
    random head columns.
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        m = rng.choice([2, 3, 4, 6])
        kind = i % 5
        if kind == 0:
            d = rng.randint(1, 3)
            matrix = [[rng.randrange(m) for _ in range(d)] for _ in range(d)]
            out.append(finite_flow([m] * d, matrix, name=f"finite Z_{m}^{d}"))
        elif kind == 1:
            out.append(scalar_flow(m, rng.randrange(m)))
        else:
            units = [c for c in range(1, m) if math.gcd(c, m) == 1]
            shift = {2: 1, 3: -1, 4: rng.choice([2, -2])}[kind]
            start = max(0, -shift) + rng.randint(0, 2)
            cols = {j: {rng.randrange(4): rng.randrange(m)} for j in range(start)}
            tail = TailRule(start, rng.choice(units), shift)
            out.append(DirectSumGroupFlow(cols, exponent=m, tail=tail, name=f"shift {shift:+d} Z_{m}"))
    return out
