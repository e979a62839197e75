"""Flow documents: a JSON description of a flow plus the families to measure over.

Categories and their fields::

    direct_sum    exponent | moduli, endomorphism.columns, endomorphism.tail
    z_lattice     rank, endomorphism.matrix
    vector_space  field ("Q" or a prime), dimension?, endomorphism.columns | matrix, tail
    free_group    rank, endomorphism.images ({"a": "ab", ...})
    set           endomorphism.map {table, start, slope, offset, size}
    matrix        matrix (rational entries as ints or "p/q" strings)
    measure       initial, transition (rational entries)

``families`` may hold ``subgroups`` and ``subsets`` (lists of element
lists), ``functionals`` (lists of rows ``{"prefix": [...], "block": [...]}``
or ``{"random": count, "seed": s}``), ``generating_sets``, ``seeds``,
``subspaces``, ``characters`` and ``partitions`` (``{"length": L,
"labels": [...]}``).  A missing family is filled with a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .abelian import DirectSumGroupFlow, TailRule, lattice_flow, vector_space_flow
from .errors import DomainError, EntropyError
from .exact import RatMatrix
from .freegroup import FreeGroupFlow
from .functionals import FiniteIndexSubgroup, PeriodicRow, RandomRow, group_exponent
from .functors import CylinderPartition, MarkovMeasure
from .setmaps import SetSelfMap

CATEGORIES = ("direct_sum", "z_lattice", "vector_space", "free_group", "set", "matrix", "measure")


class DocumentError(EntropyError, ValueError):
    """A flow document failed to parse; ``location`` names the offending field or line."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


@dataclass
class FlowDocument:
    category: str
    name: str
    flow: Any
    families: dict = field(default_factory=dict)
    group_order: int | None = None      # |K| for unit conversion, when it makes sense
    raw: dict = field(default_factory=dict)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise DocumentError(f"missing field {key!r}", where)
    return d[key]


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DocumentError(f"expected an integer, got {x!r}", where)
    return x


def _rational(x, where: str) -> Fraction:
    try:
        if isinstance(x, bool) or isinstance(x, float):
            raise ValueError
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError):
        raise DocumentError(f"expected an exact rational, got {x!r}", where) from None


def _columns(raw, where: str, convert) -> dict:
    if not isinstance(raw, dict):
        raise DocumentError("columns must be an object mapping column index to {row: coefficient}", where)
    out = {}
    for j, col in raw.items():
        try:
            jj = int(j)
        except ValueError:
            raise DocumentError(f"column key {j!r} is not an integer", where) from None
        if not isinstance(col, dict):
            raise DocumentError("column must be an object", f"{where}.{j}")
        out[jj] = {int(i): convert(a, f"{where}.{j}.{i}") for i, a in col.items()}
    return out


def _tail(raw, where: str) -> TailRule | None:
    if raw is None:
        return None
    try:
        return TailRule(_int(_need(raw, "start", where), f"{where}.start"),
                        raw.get("coefficient", 1), _int(_need(raw, "shift", where), f"{where}.shift"))
    except DomainError as exc:
        raise DocumentError(str(exc), where) from None


def _matrix(raw, where: str, convert) -> list[list]:
    if not isinstance(raw, list) or not raw or any(not isinstance(r, list) or len(r) != len(raw) for r in raw):
        raise DocumentError("matrix must be a nonempty square list of rows", where)
    return [[convert(a, f"{where}[{i}][{j}]") for j, a in enumerate(r)] for i, r in enumerate(raw)]


def _build(doc: dict) -> FlowDocument:
    category = _need(doc, "category", "$")
    if category not in CATEGORIES:
        raise DocumentError(f"unknown category {category!r}; expected one of {', '.join(CATEGORIES)}", "$.category")
    name = doc.get("name", category)
    endo = doc.get("endomorphism", {})
    order = None
    if category == "direct_sum":
        cols = _columns(endo.get("columns", {}), "$.endomorphism.columns", _int)
        tail = _tail(endo.get("tail"), "$.endomorphism.tail")
        if "moduli" in doc:
            moduli = [_int(m, f"$.moduli[{i}]") for i, m in enumerate(doc["moduli"])]
            flow = DirectSumGroupFlow(cols, moduli=moduli, name=name)
            order = math.prod(moduli) if all(moduli) else None
        else:
            m = _int(_need(doc, "exponent", "$"), "$.exponent")
            flow = DirectSumGroupFlow(cols, exponent=m, tail=tail, name=name)
            order = m
    elif category == "z_lattice":
        flow = lattice_flow(_matrix(_need(endo, "matrix", "$.endomorphism"), "$.endomorphism.matrix", _int), name)
    elif category == "vector_space":
        fld = _need(doc, "field", "$")
        conv = _rational if fld == "Q" else _int
        if "matrix" in endo:
            A = _matrix(endo["matrix"], "$.endomorphism.matrix", conv)
            cols = {j: {i: A[i][j] for i in range(len(A)) if A[i][j]} for j in range(len(A))}
            flow = vector_space_flow(fld, cols, dimension=len(A), name=name)
        else:
            cols = _columns(endo.get("columns", {}), "$.endomorphism.columns", conv)
            flow = vector_space_flow(fld, cols, doc.get("dimension"), _tail(endo.get("tail"), "$.endomorphism.tail"), name)
        order = None if fld == "Q" else int(fld)
    elif category == "free_group":
        rank = _int(_need(doc, "rank", "$"), "$.rank")
        images = {}
        for key, w in endo.get("images", {}).items():
            k = ord(key) - ord("a") if isinstance(key, str) and len(key) == 1 and key.isalpha() else None
            if k is None:
                try:
                    k = int(key)
                except ValueError:
                    raise DocumentError(f"bad generator name {key!r}", "$.endomorphism.images") from None
            images[k] = w
        flow = FreeGroupFlow(rank, images, name)
    elif category == "set":
        m = endo.get("map", {})
        flow = SetSelfMap(tuple(m.get("table", ())), m.get("start", len(m.get("table", ()))),
                          m.get("slope", 1), m.get("offset", 0), m.get("size"), name)
        order = doc.get("group_order", 2)
    elif category == "matrix":
        flow = RatMatrix(_matrix(_need(doc, "matrix", "$"), "$.matrix", _rational))
    else:
        initial = [_rational(p, f"$.initial[{i}]") for i, p in enumerate(_need(doc, "initial", "$"))]
        trans = _matrix(_need(doc, "transition", "$"), "$.transition", _rational)
        flow = MarkovMeasure(tuple(initial), tuple(tuple(r) for r in trans))
        order = len(initial)
    return FlowDocument(category, name, flow, dict(doc.get("families", {})), order, doc)


def parse_flow_document(text: str) -> FlowDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object", "$")
    try:
        return _build(doc)
    except DocumentError:
        raise
    except DomainError as exc:
        raise DocumentError(str(exc), "$") from None


def load_flow_document(path: str) -> FlowDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(str(exc), path) from None
    return parse_flow_document(text)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def _vectors(flow, raw, where: str) -> list[tuple]:
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, str):
            out.append(flow.canonical(v))
        else:
            out.append(flow.canonical(v if isinstance(v, (list, dict)) else [v]))
    return out


def subgroup_family(doc: FlowDocument, size: int = 3) -> list[list[tuple]]:
    flow = doc.flow
    if "subgroups" in doc.families:
        return [_vectors(flow, F, f"$.families.subgroups[{k}]") for k, F in enumerate(doc.families["subgroups"])]
    dim = flow.dimension or size
    return [[flow.basis_vector(i) for i in range(k)] for k in range(1, min(size, dim) + 1)]


def subset_family(doc: FlowDocument, size: int = 3) -> list[list]:
    """Finite subsets; by default spans of initial basis vectors (torsion) or symmetric balls."""
    from .functors import span_subset
    from .growth import symmetric_ball

    flow = doc.flow
    if "subsets" in doc.families:
        return [_vectors(flow, F, f"$.families.subsets[{k}]") for k, F in enumerate(doc.families["subsets"])]
    if isinstance(flow, FreeGroupFlow):
        return [flow.symmetric_generators()]
    if flow.is_torsion:
        dim = flow.dimension or size
        return [sorted(span_subset(flow, [flow.basis_vector(i) for i in range(k)])) for k in range(1, min(size, dim) + 1)]
    return [symmetric_ball(len(flow.moduli))]


def generating_family(doc: FlowDocument) -> list[list]:
    flow = doc.flow
    if "generating_sets" in doc.families:
        return [_vectors(flow, F, f"$.families.generating_sets[{k}]") for k, F in enumerate(doc.families["generating_sets"])]
    return subset_family(doc)


def functional_family(doc: FlowDocument, size: int = 6, seed: int = 0) -> list[FiniteIndexSubgroup]:
    flow = doc.flow
    M = group_exponent(flow)
    raw = doc.families.get("functionals")
    if raw is None:
        return [FiniteIndexSubgroup.random(flow, k, seed=seed + k) for k in range(1, size + 1)]
    out = []
    for k, rows in enumerate(raw):
        where = f"$.families.functionals[{k}]"
        if isinstance(rows, dict) and "random" in rows:
            out.append(FiniteIndexSubgroup.random(flow, _int(rows["random"], where), seed=rows.get("seed", seed)))
            continue
        built = []
        for r, row in enumerate(rows):
            if not isinstance(row, dict):
                raise DocumentError("row must be an object", f"{where}[{r}]")
            if "seed" in row:
                built.append(RandomRow(_int(row["seed"], f"{where}[{r}].seed"), M))
            else:
                built.append(PeriodicRow(tuple(row.get("prefix", ())), tuple(row.get("block", (0,))), M))
        try:
            out.append(FiniteIndexSubgroup(flow, built))
        except DomainError as exc:
            raise DocumentError(str(exc), where) from None
    return out


def seed_family(doc: FlowDocument, size: int = 3) -> list[frozenset]:
    raw = doc.families.get("seeds")
    if raw is None:
        return [frozenset(range(k)) for k in range(1, size + 1)]
    return [frozenset(_int(x, f"$.families.seeds[{k}]") for x in A) for k, A in enumerate(raw)]


def subspace_family(doc: FlowDocument, size: int = 3) -> list[list[tuple]]:
    flow = doc.flow
    if "subspaces" in doc.families:
        return [_vectors(flow, H, f"$.families.subspaces[{k}]") for k, H in enumerate(doc.families["subspaces"])]
    dim = flow.dimension or size
    return [[flow.basis_vector(i) for i in range(k)] for k in range(1, min(size, dim) + 1)]


def character_family(doc: FlowDocument, size: int = 3) -> list[list[tuple]]:
    """Characters of the dual, as finitely supported vectors; defaults to initial coordinates."""
    flow = doc.flow
    if "characters" in doc.families:
        return [[tuple(v) for v in X] for X in doc.families["characters"]]
    dim = flow.dimension or size
    return [[tuple(int(i == j) for j in range(i + 1)) for i in range(k)] for k in range(1, min(size, dim) + 1)]


def partition_family(doc: FlowDocument) -> list[CylinderPartition]:
    raw = doc.families.get("partitions")
    if raw is None:
        return [CylinderPartition.coordinate(doc.flow.alphabet)]
    return [CylinderPartition.make(_int(p["length"], f"$.families.partitions[{k}].length"), p["labels"])
            for k, p in enumerate(raw)]
