"""Pontryagin duality for torsion flows and bridge checks between entropies.

The dual of ``sum_j Z_{m_j}`` is identified with ``sum_j Z_{m_j}`` (finite
case) or with the full product ``Z_m^N`` (infinite case), paired by
``<x, chi> = sum_j x_j chi_j / m_j``.  The dual endomorphism is stored as
another generator table ``D``; on the compact side it acts on a sequence
``chi`` by ``(D chi)_j = sum_i D[j][i] chi_i``, which only needs finitely
many inputs per output coordinate.  Compact groups are never enumerated:
open subgroups are kernels of finitely many characters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .abelian import DirectSumGroupFlow, TailRule
from .errors import DomainError, PropertyViolation, UnsupportedEndomorphism
from .estimate import EntropyEstimate, ExactValue, Verdict
from .exact import SubgroupLattice, smith_normal_form
from .functionals import PeriodicRow, Row, group_exponent


def dual_endomorphism(flow: DirectSumGroupFlow) -> DirectSumGroupFlow:
    """The transposed generator table of the character map ``chi -> chi∘phi``."""
    if not flow.is_torsion:
        raise UnsupportedEndomorphism("only torsion flows have profinite duals here")
    name = f"dual({flow.name})"
    if flow.finite:
        mod = flow.moduli
        cols: dict = {i: {} for i in range(len(mod))}
        for j in range(len(mod)):
            for i, a in flow.image(j).items():
                b = (a * mod[j]) // mod[i]  # exact by well-definedness
                if b % mod[j]:
                    cols[i][j] = b
        return DirectSumGroupFlow(cols, moduli=mod, name=name)
    cols = {}
    for j, col in flow.columns.items():
        for i, a in col.items():
            cols.setdefault(i, {})[j] = a
    tail = flow.tail
    if tail is None or tail.coefficient == 0:
        return DirectSumGroupFlow(cols, exponent=flow.exponent, name=name)
    s, c = tail.shift, tail.coefficient
    new_start = tail.start + s
    # the transposed tail entry of column k sits in row k - s, unless that column was listed
    for k in list(cols) + [j + s for j in flow.columns if j >= tail.start]:
        if k >= new_start and k - s not in flow.columns:
            cols.setdefault(k, {})[k - s] = c
        elif k >= new_start:
            cols.setdefault(k, {})
    return DirectSumGroupFlow(cols, exponent=flow.exponent, tail=TailRule(new_start, c, -s), name=name)


class CompactFlow:
    """The dual endomorphism acting on characters of a torsion flow."""

    def __init__(self, table: DirectSumGroupFlow, name: str = ""):
        self.table = table
        self.modulus = group_exponent(table)
        self.name = name or table.name

    @classmethod
    def dual_of(cls, flow: DirectSumGroupFlow) -> "CompactFlow":
        return cls(dual_endomorphism(flow), name=f"dual({flow.name})")

    def _column_range(self, rows_needed: int) -> range:
        """Columns of the table that can hit rows below ``rows_needed``."""
        t = self.table
        if t.finite:
            return range(len(t.moduli))
        top = max([j + 1 for j in t.columns] + [0])
        if t.tail is not None and t.tail.coefficient:
            top = max(top, t.tail.start, rows_needed - t.tail.shift)
        return range(top)

    def _scale(self, j: int) -> int:
        return self.modulus // self.table.modulus(j)

    def pullback_character(self, x: tuple) -> tuple:
        """``x∘psi`` for a finitely supported character ``x`` of the compact group."""
        t = self.table
        out: dict = {}
        for i in self._column_range(len(x)):
            total = 0
            for j, d in t.image(i).items():
                if j < len(x) and x[j]:
                    # weights keep the pairing sum_j x_j chi_j / m_j consistent
                    total += x[j] * d * t.modulus(i) // t.modulus(j) if t.finite else x[j] * d
            if total:
                out[i] = total
        return t.element(out)

    def apply_values(self, chi: list, length: int) -> list:
        """First ``length`` coordinates of ``psi(chi)`` given enough of ``chi``."""
        t = self.table
        out = [0] * length
        for i in self._column_range(length):
            ci = chi[i] if i < len(chi) else 0
            if not ci:
                continue
            for j, d in t.image(i).items():
                if j < length:
                    out[j] += d * ci
        return [v % t.modulus(j) for j, v in enumerate(out)]

    def input_reach(self, length: int) -> int:
        return len(self._column_range(length))

    def apply_row(self, chi: Row) -> Row:
        """``psi(chi)`` for a character given as a row (values in ``Z_M``)."""
        t = self.table
        M = self.modulus
        if t.finite:
            d = len(t.moduli)
            scaled = [v // self._scale(j) for j, v in enumerate(chi.values(d))]
            image = self.apply_values(scaled, d)
            return PeriodicRow.finite([v * self._scale(j) for j, v in enumerate(image)], M)
        if isinstance(chi, PeriodicRow):
            tail = t.effective_tail()
            c, s = tail.coefficient, tail.shift
            # beyond every listed column, (D chi)_j = c * chi_{j - s}
            top = max([j + 1 for j in t.columns] + [i + 1 for col in t.columns.values() for i in col] + [0])
            onset = max(top, top + s, tail.start + s, len(chi.prefix) + s, 0)
            prefix = self.apply_values(chi.values(self.input_reach(onset)), onset)
            block = [(c * chi.at(onset + k - s)) % M for k in range(len(chi.block))]
            return PeriodicRow(tuple(prefix), tuple(block), M)
        return _ImageRow(self, chi)


class _ImageRow(Row):
    def __init__(self, compact: CompactFlow, base: Row):
        self.compact, self.base, self.modulus = compact, base, base.modulus
        self._cache: list[int] = []

    def values(self, length: int) -> list[int]:
        if len(self._cache) < length:
            base = self.base.values(self.compact.input_reach(length))
            self._cache = self.compact.apply_values(base, length)
        return self._cache[:length]


# ---------------------------------------------------------------------------
# annihilators
# ---------------------------------------------------------------------------


@dataclass
class Annihilator:
    moduli: tuple
    subgroup: tuple
    generators: tuple
    order: int
    subgroup_order: int

    @property
    def group_order(self) -> int:
        return math.prod(self.moduli)


def annihilator(moduli, generators) -> Annihilator:
    """``N^⊥ = {chi : sum_i x_i chi_i / m_i in Z for all x in N}`` in the dual of a finite group."""
    moduli = tuple(int(m) for m in moduli)
    if not moduli or any(m < 1 for m in moduli):
        raise DomainError("annihilators need a finite group")
    d = len(moduli)
    M = math.lcm(*moduli)
    gens = [tuple(int(a) % m for a, m in zip(list(g) + [0] * (d - len(g)), moduli)) for g in generators]
    r = len(gens)
    if r == 0:
        chars = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    else:
        # kernel of (y, z) -> B y + M z with B[k][i] = x_i (M / m_i)
        C = [[g[i] * (M // moduli[i]) for i in range(d)] + [M * int(k == l) for l in range(r)] for k, g in enumerate(gens)]
        snf = smith_normal_form(C)
        V = snf.V
        chars = [tuple(V[i][col] for i in range(d)) for col in range(snf.rank, d + r)]
    lattice = SubgroupLattice(moduli, [list(c) for c in chars])
    perp = tuple(tuple(c) for c in lattice.generators())
    perp_order = lattice.order()
    n_order = SubgroupLattice(moduli, [list(g) for g in gens]).order()
    if perp_order * n_order != math.prod(moduli):
        raise PropertyViolation("annihilator order does not match the index")
    return Annihilator(moduli, tuple(gens), perp, perp_order, n_order)


def pairing(moduli, x, chi):
    """``<x, chi>`` as a fraction of the unit circle, in ``[0, 1)``."""
    from fractions import Fraction

    total = sum(Fraction(a * b, m) for a, b, m in zip(x, chi, moduli))
    return total - math.floor(total)


# ---------------------------------------------------------------------------
# bridge reports
# ---------------------------------------------------------------------------


@dataclass
class BridgeReport:
    check: str
    subject: str
    left_label: str
    right_label: str
    left: EntropyEstimate
    right: EntropyEstimate
    constant: str = "1"
    status: str = ""
    left_scaled: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return self.status == "EQUAL"

    def to_dict(self) -> dict:
        return {
            "check": self.check, "subject": self.subject, "status": self.status, "constant": self.constant,
            "left": {"label": self.left_label, "value": _num(self.left_scaled), "verdict": self.left.verdict.value,
                     "exact": None if self.left.exact is None else str(self.left.exact)},
            "right": {"label": self.right_label, "value": _num(self.right.value), "verdict": self.right.verdict.value,
                      "exact": None if self.right.exact is None else str(self.right.exact)},
            "details": self.details,
        }


def _num(x):
    return "inf" if math.isinf(x) else x


def _decide(left: EntropyEstimate, right: EntropyEstimate, left_exact: ExactValue | None, left_value: float) -> str:
    if left.verdict is Verdict.DIVERGENT and right.verdict is Verdict.DIVERGENT:
        return "EQUAL"
    if left.verdict is Verdict.EXACT and right.verdict is Verdict.EXACT:
        if left_exact is not None and right.exact is not None:
            return "EQUAL" if left_exact.equals(right.exact) else "UNEQUAL"
        return "EQUAL" if abs(left_value - right.value) <= 1e-9 else "UNEQUAL"
    if Verdict.DIVERGENT in (left.verdict, right.verdict) and Verdict.EXACT in (left.verdict, right.verdict):
        return "UNEQUAL"
    return "UNDECIDED"


def _report(check, subject, left_label, right_label, left, right, scale_base=None, details=None) -> BridgeReport:
    """Compare ``left * log(scale_base)`` (or ``left`` itself) with ``right``."""
    if scale_base is None:
        left_exact, left_value, constant = left.exact, left.value, "1"
    else:
        left_exact = None
        if left.exact is not None and left.exact.base is None:
            left_exact = ExactValue(left.exact.coefficient, scale_base)
        left_value = left.value * math.log(scale_base)
        constant = f"log {scale_base}"
    status = _decide(left, right, left_exact, left_value)
    return BridgeReport(check, subject, left_label, right_label, left, right, constant, status, left_value, details or {})


def weiss_bridge_check(flow: DirectSumGroupFlow, family, budget: int = 10) -> BridgeReport:
    """``ent`` of a torsion flow against ``h_top`` of its compact dual.

    ``family`` lists finite subgroups by generators; on the compact side
    each becomes the open subgroup it annihilates.
    """
    from . import functors

    left = functors.ent(flow, family, budget)
    right = functors.h_top_profinite(CompactFlow.dual_of(flow), family, budget)
    return _report("weiss", flow.name, "ent", "h_top(dual)", left, right)


def ent_star_bridge_check(flow: DirectSumGroupFlow, family, budget: int = 8) -> BridgeReport:
    """``ent*`` of a torsion flow against ``ent`` of its dual on the annihilators ``N^⊥``."""
    from . import functors

    left = functors.ent_star(flow, family, budget)
    right = functors.ent_compact(CompactFlow.dual_of(flow), [N.rows for N in family], budget)
    return _report("ent_star", flow.name, "ent*", "ent(dual)", left, right)


def shift_bridge_check(lam, m: int, budget: int = 10, family_size: int = 3) -> list[BridgeReport]:
    """Both generalized-shift bridges for a self-map ``lam`` and ``K = Z_m``.

    (a) ``𝔥(lam) log m`` against ``h_top`` of ``f -> f∘lam`` on ``K^X``.
    (b) ``𝔥*(lam) log m`` against ``h_alg`` of its restriction to ``sum_X K``.
    """
    from . import functors
    from .setmaps import generalized_shift_flow

    points = lam.size if lam.finite else None
    ks = range(1, (min(family_size, points) if points else family_size) + 1)
    seeds = [frozenset(range(k)) for k in ks]
    sum_flow = generalized_shift_flow(lam, m, "sum")
    compact = CompactFlow(sum_flow, name=f"σ[{lam.name}] on Z_{m}^X")
    opens = [[sum_flow.basis_vector(i) for i in range(k)] for k in ks]
    set_side = functors.set_entropy(lam, seeds, budget)
    top_side = functors.h_top_profinite(compact, opens, budget)
    a = _report("shift_a", lam.name, "𝔥", "h_top(σ)", set_side, top_side, scale_base=m)

    star_side = functors.set_entropy_star(lam, seeds, budget)
    subsets = [functors.span_subset(sum_flow, [sum_flow.basis_vector(i) for i in range(k)]) for k in ks[:2]]
    alg_side = functors.h_alg(sum_flow, subsets, min(budget, 8))
    b = _report("shift_b", lam.name, "𝔥*", "h_alg(σ⊕)", star_side, alg_side, scale_base=m)
    return [a, b]
