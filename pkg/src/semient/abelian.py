"""Abelian group flows given by generator-image tables.

A flow is a group ``sum_i Z_{m_i}`` (finitely many factors, or countably
many copies of one ``Z_m``) together with an endomorphism.  The
endomorphism is stored column by column: ``columns[j]`` is the image of
the generator ``e_j`` as a sparse ``{i: coefficient}`` map.  On an
infinite index set the unlisted columns follow a tail rule
``e_j -> c * e_{j+s}`` for ``j >= start``; columns below ``start`` that
are not listed map to zero.

Moduli use 0 for a copy of Z and ``None`` for a copy of Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, ResourceError, UnsupportedEndomorphism
from .exact import SubgroupLattice

DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class TailRule:
    start: int
    coefficient: int
    shift: int

    def __post_init__(self):
        if self.start < 0 or self.start + self.shift < 0:
            raise DomainError(f"tail rule {self} points below index 0")


def _reduce(value, modulus):
    if modulus is None:
        return Fraction(value)
    if modulus == 0:
        return int(value)
    return int(value) % modulus


class DirectSumGroupFlow:
    """An abelian group with a column-finite endomorphism.

    Exactly one of ``moduli`` (finite index set) or ``exponent`` (index set
    the naturals, uniform factor) must be given.
    """

    def __init__(
        self,
        columns: dict | None = None,
        moduli: Sequence | None = None,
        exponent: int | None = None,
        tail: TailRule | None = None,
        name: str = "",
        rational: bool = False,
    ):
        if (moduli is None) == (exponent is None and not rational):
            raise DomainError("give either finite moduli or a uniform exponent")
        self.finite = moduli is not None
        self.moduli = tuple(moduli) if self.finite else None
        self.exponent = None if self.finite else exponent
        self.name = name
        if self.finite and tail is not None:
            raise DomainError("tail rules only make sense on an infinite index set")
        self.tail = tail
        cols = {}
        for j, col in (columns or {}).items():
            j = int(j)
            if self.finite and not 0 <= j < len(self.moduli):
                raise DomainError(f"column {j} outside the index set")
            m_j = self.modulus(j)
            entries = {}
            for i, a in col.items():
                i = int(i)
                if i < 0 or (self.finite and i >= len(self.moduli)):
                    raise DomainError(f"entry ({i},{j}) outside the index set")
                a = _reduce(a, self.modulus(i))
                if a:
                    entries[i] = a
            cols[j] = entries
            self._check_order(j, m_j, entries)
        self.columns = cols
        if tail is not None:
            m = self.exponent
            self.tail = TailRule(tail.start, _reduce(tail.coefficient, m), tail.shift)

    # -- structure ---------------------------------------------------------

    def modulus(self, i: int):
        return self.moduli[i] if self.finite else self.exponent

    @property
    def dimension(self) -> int | None:
        return len(self.moduli) if self.finite else None

    @property
    def is_torsion(self) -> bool:
        if self.finite:
            return all(m not in (0, None) for m in self.moduli)
        return self.exponent not in (0, None)

    @property
    def is_rational(self) -> bool:
        return None in (self.moduli or (self.exponent,))

    def _check_order(self, j, m_j, entries):
        for i, a in entries.items():
            m_i = self.modulus(i)
            if m_i in (0, None) or m_j is None:
                if m_j not in (0, None) and a:
                    raise DomainError(f"e_{j} has finite order but its image has a component of infinite order")
                continue
            if m_j and (m_j * a) % m_i:
                raise DomainError(f"image of e_{j} has order not dividing {m_j}")

    def image(self, j: int) -> dict:
        if j in self.columns:
            return self.columns[j]
        if self.tail is not None and j >= self.tail.start:
            return {j + self.tail.shift: self.tail.coefficient} if self.tail.coefficient else {}
        return {}

    def listed_bound(self) -> int:
        """One past the largest index touched by listed columns or the tail start."""
        top = 0
        for j, col in self.columns.items():
            top = max(top, j + 1, *(i + 1 for i in col))
        if self.tail is not None:
            top = max(top, self.tail.start, self.tail.start + self.tail.shift)
        return top

    # -- elements ----------------------------------------------------------

    def zero(self) -> tuple:
        return (self._zero_entry(),) * len(self.moduli) if self.finite else ()

    def _zero_entry(self):
        return Fraction(0) if self.is_rational else 0

    def element(self, values: Sequence | dict) -> tuple:
        if isinstance(values, dict):
            size = (max(values) + 1) if values else 0
            dense = [0] * size
            for i, a in values.items():
                dense[i] = a
            values = dense
        if isinstance(values, (int, Fraction)):
            values = [values]
        values = list(values)
        if self.finite:
            if len(values) > len(self.moduli):
                raise DomainError("element longer than the index set")
            values += [0] * (len(self.moduli) - len(values))
            return tuple(_reduce(a, m) for a, m in zip(values, self.moduli))
        out = [_reduce(a, self.exponent) for a in values]
        while out and not out[-1]:
            out.pop()
        return tuple(out)

    def basis_vector(self, i: int, coefficient=1) -> tuple:
        return self.element({i: coefficient})

    def op(self, x: tuple, y: tuple) -> tuple:
        if self.finite:
            return tuple(_reduce(a + b, m) for a, b, m in zip(x, y, self.moduli))
        n = max(len(x), len(y))
        x = x + (0,) * (n - len(x))
        y = y + (0,) * (n - len(y))
        return self.element([a + b for a, b in zip(x, y)])

    add = op

    def negate(self, x: tuple) -> tuple:
        return self.element([-a for a in x])

    def scale(self, x: tuple, c) -> tuple:
        return self.element([c * a for a in x])

    def apply(self, x: tuple) -> tuple:
        out: dict = {}
        for j, a in enumerate(x):
            if not a:
                continue
            for i, b in self.image(j).items():
                out[i] = out.get(i, 0) + a * b
        return self.element(out)

    __call__ = apply

    def apply_power(self, x: tuple, k: int) -> tuple:
        for _ in range(k):
            x = self.apply(x)
        return x

    def canonical(self, x) -> tuple:
        return self.element(x)

    def order_of(self, x: tuple):
        """Order of an element (``math.inf`` if it has a free component)."""
        out = 1
        for i, a in enumerate(x):
            if not a:
                continue
            m = self.modulus(i)
            if m in (0, None):
                return math.inf
            out = math.lcm(out, m // math.gcd(m, a))
        return out

    # -- endomorphism algebra -----------------------------------------------

    def matrix(self, size: int | None = None) -> list[list]:
        """Dense matrix of the first ``size`` columns (rows as far as they reach)."""
        n = len(self.moduli) if self.finite else size
        if n is None:
            raise DomainError("give a window size for an infinite flow")
        cols = [self.image(j) for j in range(n)]
        rows = n if self.finite else max([n] + [i + 1 for c in cols for i in c])
        return [[cols[j].get(i, 0) for j in range(n)] for i in range(rows)]

    def canonical_table(self) -> tuple:
        """A normal form of the endomorphism table, used for equality."""
        cols = {j: dict(c) for j, c in self.columns.items()}
        tail = self.tail
        if tail is not None and tail.coefficient == 0:
            tail = None  # unlisted columns are zero either way
        if tail is not None:
            s, c = tail.shift, tail.coefficient
            for j in [j for j in cols if j >= tail.start and cols[j] == {j + s: c}]:
                del cols[j]
            start = tail.start
            while start > 0 and start - 1 + s >= 0 and cols.get(start - 1) == {start - 1 + s: c}:
                del cols[start - 1]
                start -= 1
            tail = TailRule(start, c, s)
        cols = {j: c for j, c in cols.items() if c or (tail is not None and j >= tail.start)}
        key_cols = tuple(sorted((j, tuple(sorted(c.items()))) for j, c in cols.items()))
        key_tail = None if tail is None else (tail.start, tail.coefficient, tail.shift)
        return (self.moduli, self.exponent, key_cols, key_tail)

    def same_endomorphism(self, other: "DirectSumGroupFlow") -> bool:
        return self.canonical_table() == other.canonical_table()

    def compose(self, other: "DirectSumGroupFlow") -> "DirectSumGroupFlow":
        """``self`` after ``other`` (on the same group)."""
        if (self.moduli, self.exponent) != (other.moduli, other.exponent):
            raise DomainError("composition needs the same underlying group")
        if self.finite:
            cols = {j: _as_dict(self.apply(other.image_vector(j))) for j in range(len(self.moduli))}
            return DirectSumGroupFlow(cols, moduli=self.moduli, name=f"{self.name}∘{other.name}")
        t1, t2 = self.effective_tail(), other.effective_tail()
        start = max(t2.start, t1.start - t2.shift, 0)
        bound = max(self.listed_bound(), other.listed_bound()) + abs(t2.shift) + 1
        start = max(start, bound)
        cols = {j: _as_dict(self.apply(other.image_vector(j))) for j in range(start)}
        tail = TailRule(start, t1.coefficient * t2.coefficient, t1.shift + t2.shift)
        return DirectSumGroupFlow(cols, exponent=self.exponent, tail=tail, name=f"{self.name}∘{other.name}")

    def power(self, k: int) -> "DirectSumGroupFlow":
        if k < 1:
            raise DomainError("powers start at 1")
        out = self
        for _ in range(k - 1):
            out = self.compose(out)
        out.name = f"{self.name}^{k}"
        return out

    def effective_tail(self) -> TailRule:
        """The tail rule, with a missing one read as the zero map beyond the listed columns."""
        return self.tail if self.tail is not None else TailRule(self.listed_bound(), 0, 0)

    def image_vector(self, j: int) -> tuple:
        return self.element(self.image(j))

    def __repr__(self):
        group = f"moduli={self.moduli}" if self.finite else f"exponent={self.exponent}"
        return f"DirectSumGroupFlow({self.name or '?'}, {group}, columns={self.columns}, tail={self.tail})"


def _as_dict(x: tuple) -> dict:
    return {i: a for i, a in enumerate(x) if a}


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def bernoulli_flow(m: int, side: str = "right") -> DirectSumGroupFlow:
    """The coordinate shift on countably many copies of ``Z_m``."""
    if side == "right":
        return DirectSumGroupFlow({}, exponent=m, tail=TailRule(0, 1, 1), name=f"right shift Z_{m}")
    if side == "left":
        return DirectSumGroupFlow({0: {}}, exponent=m, tail=TailRule(1, 1, -1), name=f"left shift Z_{m}")
    raise DomainError(f"unknown shift side {side!r}")


def identity_flow(m: int | None = None, moduli: Sequence | None = None) -> DirectSumGroupFlow:
    if moduli is not None:
        return DirectSumGroupFlow({j: {j: 1} for j in range(len(moduli))}, moduli=moduli, name="id")
    return DirectSumGroupFlow({}, exponent=m, tail=TailRule(0, 1, 0), name="id")


def scalar_flow(m: int, c: int) -> DirectSumGroupFlow:
    """``e_i -> c e_i`` on countably many copies of ``Z_m``."""
    return DirectSumGroupFlow({}, exponent=m, tail=TailRule(0, c, 0), name=f"x↦{c}x")


def finite_flow(moduli: Sequence[int], matrix: Sequence[Sequence[int]], name: str = "") -> DirectSumGroupFlow:
    """``x -> A x`` on ``sum Z_{m_i}``; column ``j`` of ``A`` is the image of ``e_j``."""
    d = len(moduli)
    if len(matrix) != d or any(len(r) != d for r in matrix):
        raise DomainError("matrix shape does not match the moduli")
    cols = {j: {i: matrix[i][j] for i in range(d) if matrix[i][j]} for j in range(d)}
    return DirectSumGroupFlow(cols, moduli=moduli, name=name)


def lattice_flow(matrix: Sequence[Sequence[int]], name: str = "") -> DirectSumGroupFlow:
    """``x -> A x`` on ``Z^d``."""
    return finite_flow([0] * len(matrix), matrix, name)


def rational_flow(matrix: Sequence[Sequence], name: str = "") -> DirectSumGroupFlow:
    d = len(matrix)
    cols = {j: {i: Fraction(matrix[i][j]) for i in range(d) if matrix[i][j]} for j in range(d)}
    return DirectSumGroupFlow(cols, moduli=[None] * d, name=name)


def vector_space_flow(field_order, columns: dict | None = None, dimension: int | None = None,
                      tail: TailRule | None = None, name: str = "") -> DirectSumGroupFlow:
    """A linear flow over ``GF(p)`` (prime ``field_order``) or over Q (``field_order="Q"``).

    With ``dimension`` the space is finite dimensional; otherwise it has
    a countable basis and the map may use a tail rule.
    """
    if field_order == "Q":
        m = None
    else:
        p = int(field_order)
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise DomainError(f"{field_order} is not a prime field order")
        m = p
    if dimension is not None:
        return DirectSumGroupFlow(columns or {}, moduli=[m] * dimension, name=name)
    if m is None:
        return DirectSumGroupFlow(columns or {}, exponent=None, tail=tail, name=name, rational=True)
    return DirectSumGroupFlow(columns or {}, exponent=m, tail=tail, name=name)


def product_flow(f1: DirectSumGroupFlow, f2: DirectSumGroupFlow) -> DirectSumGroupFlow:
    """``phi_1 x phi_2`` on ``G_1 x G_2``.

    Finite flows are placed side by side.  Two infinite flows of the same
    exponent are interleaved: even indices carry the first, odd the second.
    """
    if f1.finite and f2.finite:
        d1 = len(f1.moduli)
        cols = {j: dict(f1.image(j)) for j in range(d1)}
        for j in range(len(f2.moduli)):
            cols[d1 + j] = {d1 + i: a for i, a in f2.image(j).items()}
        return DirectSumGroupFlow(cols, moduli=f1.moduli + f2.moduli, name=f"{f1.name}×{f2.name}")
    if f1.finite or f2.finite or f1.exponent != f2.exponent:
        raise UnsupportedEndomorphism("products need two finite flows or two infinite flows of one exponent")
    t1, t2 = f1.effective_tail(), f2.effective_tail()
    if (t1.coefficient, t1.shift) != (t2.coefficient, t2.shift) and 0 not in (t1.coefficient, t2.coefficient):
        raise UnsupportedEndomorphism("interleaving needs matching tail rules")
    start = max(f1.listed_bound(), f2.listed_bound(), t1.start, t2.start) + abs(t1.shift) + 1
    cols = {}
    for j in range(start):
        cols[2 * j] = {2 * i: a for i, a in f1.image(j).items()}
        cols[2 * j + 1] = {2 * i + 1: a for i, a in f2.image(j).items()}
    tail = TailRule(2 * start, t1.coefficient, 2 * t1.shift)
    return DirectSumGroupFlow(cols, exponent=f1.exponent, tail=tail, name=f"{f1.name}×{f2.name}")


def split_product_element(x: tuple, finite_dims: tuple | None = None):
    """Inverse of the coordinate placement used by ``product_flow``."""
    if finite_dims is not None:
        d1 = finite_dims[0]
        return x[:d1], x[d1:]
    return x[0::2], x[1::2]


# ---------------------------------------------------------------------------
# finite subgroups and their trajectories
# ---------------------------------------------------------------------------


@dataclass
class FiniteSubgroup:
    flow: DirectSumGroupFlow
    generators: tuple
    cardinality: int = field(default=0)

    def __post_init__(self):
        self.generators = tuple(self.flow.canonical(g) for g in self.generators)
        if not self.cardinality:
            lattice = _lattice(self.flow, [self.generators])
            self.cardinality = lattice.order()
        if self.cardinality == math.inf:
            raise DomainError("generators include an element of infinite order")

    def elements(self, cap: int = DEFAULT_CAP) -> set:
        """Explicit enumeration (closure under addition), for small subgroups."""
        if self.cardinality > cap:
            raise ResourceError(f"subgroup of order {self.cardinality} exceeds cap {cap}")
        out = {self.flow.zero()}
        frontier = list(out)
        while frontier:
            new = []
            for x in frontier:
                for g in self.generators:
                    y = self.flow.op(x, g)
                    if y not in out:
                        out.add(y)
                        new.append(y)
            frontier = new
        return out

    def contains(self, x) -> bool:
        return _lattice(self.flow, [self.generators]).contains(list(self.flow.canonical(x)))


def _window(flow: DirectSumGroupFlow, vectors: Iterable) -> int:
    if flow.finite:
        return len(flow.moduli)
    return max([1] + [len(v) for v in vectors])


def _lattice(flow: DirectSumGroupFlow, groups: Sequence[Sequence[tuple]]) -> SubgroupLattice:
    vecs = [v for g in groups for v in g]
    w = _window(flow, vecs)
    moduli = [flow.modulus(i) for i in range(w)]
    if None in moduli:
        raise DomainError("subgroup lattices need integer moduli")
    return SubgroupLattice(moduli, [list(v) for v in vecs])


def subgroup_trajectory_orders(flow: DirectSumGroupFlow, generators: Sequence, n: int,
                               cap: int | None = None) -> list[int]:
    """``|F + phi(F) + ... + phi^(k-1)(F)|`` for ``k = 1..n``.

    Orders come from the lattice basis, so no cap is needed unless asked for.
    """
    if not flow.is_torsion:
        raise DomainError("finite subgroups live in torsion flows")
    gens = [flow.canonical(g) for g in generators]
    layers = [gens]
    for _ in range(n - 1):
        layers.append([flow.apply(g) for g in layers[-1]])
    w = _window(flow, [v for layer in layers for v in layer])
    lattice = SubgroupLattice([flow.modulus(i) for i in range(w)])
    orders = []
    for layer in layers:
        for v in layer:
            lattice.add(list(v))
        size = lattice.order()
        if cap is not None and size > cap:
            raise ResourceError(f"trajectory subgroup of order {size} exceeds cap {cap}", partial=orders)
        orders.append(size)
    return orders


def finite_subgroup_trajectory(flow: DirectSumGroupFlow, F: FiniteSubgroup, n: int,
                               cap: int = DEFAULT_CAP) -> FiniteSubgroup:
    """``T_n(phi, F)`` as a finite subgroup with exact cardinality."""
    if n < 1:
        raise DomainError("trajectory length must be positive")
    gens = list(F.generators)
    layer = list(gens)
    for _ in range(n - 1):
        layer = [flow.apply(g) for g in layer]
        gens.extend(layer)
    lattice = _lattice(flow, [gens])
    order = lattice.order()
    if order > cap:
        raise ResourceError(f"trajectory subgroup of order {order} exceeds cap {cap}")
    return FiniteSubgroup(flow, tuple(flow.canonical(g) for g in lattice.generators()), order)


# ---------------------------------------------------------------------------
# finite subsets
# ---------------------------------------------------------------------------


def subset_trajectory_sizes(flow, F: Iterable, n: int, left: bool = False, cap: int = DEFAULT_CAP) -> list[int]:
    """``|T_k(phi, F)|`` for ``k = 1..n``, where ``T_k`` is the product set
    ``F · phi(F) · ... · phi^(k-1)(F)`` (reversed for ``left``).

    ``flow`` needs ``op``, ``apply`` and ``canonical``; this covers direct
    sum flows and free group flows.
    """
    current = {flow.canonical(x) for x in F}
    if not current:
        raise DomainError("empty subset")
    image = set(current)
    sizes = [len(current)]
    for _ in range(n - 1):
        image = {flow.apply(x) for x in image}
        if left:
            current = {flow.op(y, t) for y in image for t in current}
        else:
            current = {flow.op(t, y) for t in current for y in image}
        if len(current) > cap:
            raise ResourceError(f"trajectory set exceeded cap {cap}", partial=sizes)
        sizes.append(len(current))
    return sizes


def finite_subset_trajectory(flow, F: Iterable, n: int, left: bool = False, cap: int = DEFAULT_CAP) -> frozenset:
    current = frozenset(flow.canonical(x) for x in F)
    image = set(current)
    for _ in range(n - 1):
        image = {flow.apply(x) for x in image}
        if left:
            current = frozenset(flow.op(y, t) for y in image for t in current)
        else:
            current = frozenset(flow.op(t, y) for t in current for y in image)
        if len(current) > cap:
            raise ResourceError(f"trajectory set exceeded cap {cap}")
    return current
