"""Command-line front end.

Exit codes: 0 success, 1 selftest failure, 2 bad input, 3 unsupported
combination, 4 resource cap (a partial table is still printed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable

from . import duality, functors, growth
from .abelian import DirectSumGroupFlow
from .documents import (DocumentError, FlowDocument, canonical_json, character_family, functional_family,
                        generating_family, load_flow_document, partition_family, seed_family, subgroup_family,
                        subset_family, subspace_family)
from .errors import DomainError, EntropyError, NumericError, ResourceError, UnsupportedEndomorphism
from .estimate import EntropyEstimate, Verdict
from .exact import IntPolynomial, RatMatrix
from .mahler import ayf_entropy, mahler_measure

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_RESOURCE = 0, 1, 2, 3, 4

KINDS = ("set", "set_star", "ent", "alg", "ent_star", "top", "dim", "ayf", "mes")
COUNT_KINDS = ("set", "set_star", "dim")   # rates of cardinalities or dimensions, not logarithms


class Unsupported(EntropyError):
    pass


def _num(x: float):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _units(value: float, order: int | None) -> dict:
    out = {"nats": _num(value), "log2_multiple": _num(value / math.log(2))}
    if order and order > 1:
        out["logK_multiple"] = _num(value / math.log(order))
        out["K"] = order
    return out


def convergence_table(c: list) -> list[dict]:
    rows, best = [], math.inf
    for n, x in enumerate(c, start=1):
        ratio = float(x) / n
        best = min(best, ratio)
        rows.append({"n": n, "c_n": _num(x), "c_n_over_n": _num(ratio), "min_so_far": _num(best)})
    return rows


def _witness(est: EntropyEstimate) -> EntropyEstimate:
    if not est.members:
        return est
    finite = [m for m in est.members if m.c]
    return max(finite, key=lambda m: m.value) if finite else est.members[-1]


def entropy_report(kind: str, doc: FlowDocument, est: EntropyEstimate) -> dict:
    w = _witness(est)
    report = {
        "command": "entropy",
        "kind": kind,
        "flow": doc.name,
        "verdict": est.verdict.value,
        "value": {"rate": _num(est.value)} if kind in COUNT_KINDS else _units(est.value, doc.group_order),
        "table": convergence_table(w.c),
        "members": [m.to_dict(members=False) for m in est.members] if est.members else [est.to_dict(members=False)],
    }
    if est.exact is not None:
        report["exact"] = str(est.exact)
    if est.note:
        report["note"] = est.note
    return report


def _require(cond: bool, kind: str, doc: FlowDocument):
    if not cond:
        raise Unsupported(f"entropy kind {kind!r} does not apply to a {doc.category} flow")


def compute_entropy(kind: str, doc: FlowDocument, budget: int | None, family_size: int, tolerance: float,
                    seed: int, cap: int = growth.GROWTH_CAP) -> EntropyEstimate:
    flow, cat = doc.flow, doc.category
    torsion = isinstance(flow, DirectSumGroupFlow) and flow.is_torsion
    if kind in ("set", "set_star"):
        _require(cat == "set", kind, doc)
        fn = functors.set_entropy if kind == "set" else functors.set_entropy_star
        return fn(flow, seed_family(doc, family_size), budget or 20)
    if kind == "ent":
        _require(cat == "direct_sum" and torsion, kind, doc)
        return functors.ent(flow, subgroup_family(doc, family_size), budget or 12)
    if kind == "alg":
        _require(cat in ("direct_sum", "z_lattice", "free_group"), kind, doc)
        return functors.h_alg(flow, subset_family(doc, family_size), budget or 8, cap=cap)
    if kind == "ent_star":
        _require(cat == "direct_sum" and torsion, kind, doc)
        return functors.ent_star(flow, functional_family(doc, max(family_size, 6), seed), budget or 8)
    if kind == "top":
        _require(cat == "direct_sum" and torsion, kind, doc)
        return functors.h_top_profinite(duality.CompactFlow.dual_of(flow), character_family(doc, family_size), budget or 12)
    if kind == "dim":
        _require(cat == "vector_space", kind, doc)
        return functors.ent_dim(flow, subspace_family(doc, family_size), budget or 12)
    if kind == "mes":
        _require(cat == "measure", kind, doc)
        return functors.h_mes_symbolic(flow, partition_family(doc), budget or 8, tolerance)
    if kind == "ayf":
        if cat == "matrix":
            A = flow
        elif cat == "z_lattice" or (cat == "vector_space" and flow.is_rational and flow.finite):
            A = RatMatrix(flow.matrix())
        else:
            raise Unsupported(f"entropy kind 'ayf' needs a finite rational matrix, not a {cat} flow")
        value = ayf_entropy(A, min(tolerance, 1e-9))
        return EntropyEstimate([], Verdict.EXACT, value, value, note="Mahler measure of the characteristic polynomial")
    raise Unsupported(f"unknown entropy kind {kind!r}")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return canonical_json(report) + "\n"
    if fmt == "csv":
        if "csv" in report:
            return report["csv"]
        rows = report.get("table") or report.get("rows") or []
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()
    lines = []
    for key in sorted(report):
        if key in ("table", "members", "csv", "rows", "checks", "reports"):
            continue
        val = report[key]
        if isinstance(val, dict):
            val = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(val.items()))
        lines.append(f"{key}: {_fmt(val)}")
    if report.get("table"):
        lines.append(f"{'n':>4} {'c_n':>16} {'c_n/n':>16} {'min so far':>16}")
        for r in report["table"]:
            lines.append(f"{r['n']:>4} {_fmt(r['c_n']):>16} {_fmt(r['c_n_over_n']):>16} {_fmt(r['min_so_far']):>16}")
    for r in report.get("reports", []):
        lines.append(f"{r['check']} {r['subject']}: {r['status']} "
                     f"{r['left']['label']} = {_fmt(r['left']['value'])}, {r['right']['label']} = {_fmt(r['right']['value'])}"
                     f" (constant {r['constant']})")
    for r in report.get("checks", []):
        lines.append(r)
    if "csv" in report:
        lines.append(report["csv"].rstrip("\n"))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _flow_path(args) -> str:
    path = args.flow or args.path
    if not path:
        raise DocumentError("no flow document given", "command line")
    return path


def cmd_entropy(args) -> tuple[int, dict]:
    doc = load_flow_document(_flow_path(args))
    try:
        est = compute_entropy(args.kind, doc, args.budget, args.family, args.tolerance, args.seed, args.cap)
    except ResourceError as exc:
        return EXIT_RESOURCE, {"command": "entropy", "kind": args.kind, "flow": doc.name, "error": str(exc),
                               "table": convergence_table(list(exc.partial or []))}
    return EXIT_OK, entropy_report(args.kind, doc, est)


def _parse_polynomial(text: str) -> IntPolynomial:
    text = text.strip()
    if text.startswith("["):
        try:
            coeffs = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(exc.msg, f"polynomial column {exc.colno}") from None
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in coeffs):
            raise DocumentError("coefficients must be integers", "polynomial")
        # highest degree first, as written
        return IntPolynomial(list(reversed(coeffs)))
    try:
        return IntPolynomial.from_string(text)
    except (DomainError, ValueError) as exc:
        raise DocumentError(str(exc), "polynomial") from None


def cmd_mahler(args) -> tuple[int, dict]:
    f = _parse_polynomial(args.polynomial)
    res = mahler_measure(f, args.tolerance if args.tolerance < 1e-9 else 1e-12)
    report = {
        "command": "mahler",
        "polynomial": str(f),
        "value": _units(res.value, None),
        "leading_term": _num(res.leading_term),
        "error_bound": _num(res.error_bound),
        "ambiguous": res.ambiguous,
    }
    return EXIT_OK, report


def cmd_growth(args) -> tuple[int, dict]:
    doc = load_flow_document(_flow_path(args))
    if doc.category not in ("direct_sum", "z_lattice", "free_group"):
        raise Unsupported(f"growth needs a group flow, not a {doc.category} document")
    F = generating_family(doc)[0]
    N = args.N or args.budget or 12
    try:
        sample = growth.growth_sequence(doc.flow, F, N, cap=args.cap)
    except ResourceError as exc:
        rows = [{"n": n, "gamma": g} for n, g in enumerate(exc.partial, start=1)]
        return EXIT_RESOURCE, {"command": "growth", "flow": doc.name, "error": str(exc), "rows": rows}
    verdict = growth.classify_growth(sample)
    est = growth.count_estimate(sample.values)
    report = {
        "command": "growth",
        "flow": doc.name,
        "N": N,
        "verdict": str(verdict),
        "evidence": verdict.evidence,
        "entropy": _units(est.value, doc.group_order),
        "entropy_verdict": est.verdict.value,
        "gamma": sample.values,
        "csv": growth.growth_csv(sample),
    }
    return EXIT_OK, report


def cmd_bridge(args) -> tuple[int, dict]:
    doc = load_flow_document(_flow_path(args))
    budget = args.budget
    if args.check == "shift":
        if doc.category != "set":
            raise Unsupported("the shift bridge needs a set self-map document")
        reports = duality.shift_bridge_check(doc.flow, doc.group_order or 2, budget or 10)
    else:
        if doc.category != "direct_sum" or not doc.flow.is_torsion:
            raise Unsupported(f"the {args.check} bridge needs a torsion direct-sum flow")
        if args.check == "weiss":
            reports = [duality.weiss_bridge_check(doc.flow, subgroup_family(doc, args.family), budget or 10)]
        else:
            reports = [duality.ent_star_bridge_check(doc.flow, functional_family(doc, max(args.family, 6), args.seed),
                                                     budget or 8)]
    dicts = []
    for r in reports:
        d = r.to_dict()
        d["left"]["label"] = r.left_label
        d["right"]["label"] = r.right_label
        dicts.append(d)
    status = "EQUAL" if all(r.status == "EQUAL" for r in reports) else "NOT EQUAL"
    return EXIT_OK, {"command": "bridge", "check": args.check, "flow": doc.name, "status": status, "reports": dicts}


def cmd_selftest(args) -> tuple[int, dict]:
    from .selftest import run_battery

    results = run_battery(args.seed)
    failed = [r for r in results if not r.passed]
    report = {
        "command": "selftest",
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "checks": [r.line() for r in results],
    }
    return (EXIT_FAIL if failed else EXIT_OK), report


COMMANDS: dict[str, Callable] = {
    "entropy": cmd_entropy, "mahler": cmd_mahler, "growth": cmd_growth, "bridge": cmd_bridge, "selftest": cmd_selftest,
}


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _tolerance(text: str) -> float:
    v = float(text)
    if not 0 < v <= 0.1:
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 0.1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--budget", type=_positive, default=None, help="largest trajectory length n")
    common.add_argument("--tolerance", type=_tolerance, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--family", type=_positive, default=3, help="size of default families")
    common.add_argument("--cap", type=_positive, default=growth.GROWTH_CAP, help="largest trajectory set")

    parser = argparse.ArgumentParser(prog="semient", description="Entropy of flows via normed semigroups.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("entropy", parents=[common], help="entropy of a flow document")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--flow", default=None)
    p.add_argument("path", nargs="?")
    p = sub.add_parser("mahler", parents=[common], help="Mahler measure of an integer polynomial")
    p.add_argument("polynomial", help='expression such as "t^2-t-1" or coefficients "[1,-1,-1]" (highest first)')
    p = sub.add_parser("growth", parents=[common], help="growth function and its classification")
    p.add_argument("--flow", default=None)
    p.add_argument("--N", type=_positive, default=None)
    p.add_argument("path", nargs="?")
    p = sub.add_parser("bridge", parents=[common], help="compare entropies across a duality")
    p.add_argument("--check", choices=("weiss", "ent_star", "shift"), required=True)
    p.add_argument("--flow", default=None)
    p.add_argument("path", nargs="?")
    sub.add_parser("selftest", parents=[common], help="run the property battery")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        code, report = COMMANDS[args.command](args)
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (Unsupported, UnsupportedEndomorphism) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        out.write(render({"error": str(exc), "table": convergence_table(list(exc.partial or []))}, args.format))
        return EXIT_RESOURCE
    except (DomainError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out.write(render(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
