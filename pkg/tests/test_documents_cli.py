import io
import json
import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from semient.cli import main
from semient.documents import DocumentError, canonical_json, load_flow_document, parse_flow_document

FLOWS = Path(__file__).resolve().parents[1] / "flows"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    return code, json.loads(text)


@pytest.mark.parametrize("path", sorted(FLOWS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_documents_parse(path):
    doc = load_flow_document(str(path))
    assert doc.category and doc.flow is not None


@pytest.mark.parametrize("file, kind, expected", [
    ("bernoulli_z2.json", "alg", math.log(2)),
    ("bernoulli_z2.json", "ent", math.log(2)),
    ("left_shift_z2.json", "top", 0.0),
    ("matrix_fib.json", "ayf", math.log((1 + 5 ** 0.5) / 2)),
    ("free_group_id.json", "alg", math.log(3)),
    ("markov_two_state.json", "mes", 0.46209812037329684),
    ("shift_squared_gf2.json", "dim", 2.0),
])
def test_entropy_command_values(file, kind, expected):
    code, report = run_json("entropy", str(FLOWS / file), "--kind", kind)
    assert code == 0
    value = report["value"]
    nats = value["nats"] if isinstance(value, dict) and "nats" in value else value["rate"]
    assert abs(nats - expected) < 1e-7


def test_set_kinds_report_rates():
    _, forward = run_json("entropy", str(FLOWS / "successor.json"), "--kind", "set")
    _, backward = run_json("entropy", str(FLOWS / "successor.json"), "--kind", "set_star")
    assert forward["value"] == {"rate": 1.0} and backward["value"] == {"rate": 0.0}


def test_divergent_adjoint_entropy():
    code, report = run_json("entropy", str(FLOWS / "bernoulli_z2.json"), "--kind", "ent_star")
    assert code == 0 and report["verdict"] == "Divergent"


def test_json_output_is_deterministic_and_canonical():
    argv = ("entropy", str(FLOWS / "bernoulli_z2.json"), "--kind", "ent", "--format", "json")
    first, second = run(*argv)[1], run(*argv)[1]
    assert first == second
    assert first.strip() == canonical_json(json.loads(first))


def test_mahler_command_forms_agree():
    _, a = run_json("mahler", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1")
    _, b = run_json("mahler", "[1,1,0,-1,-1,-1,-1,-1,0,1,1]")
    assert a["value"] == b["value"]
    assert abs(a["value"]["nats"] - 0.16235761200773813) < 1e-9


def test_growth_command_prints_verdict_and_csv():
    code, text = run("growth", str(FLOWS / "z2_unipotent.json"), "--N", "12")
    assert code == 0
    assert "verdict: Polynomial(3)" in text
    assert "n,gamma,log_gamma_over_n,log_gamma_over_log_n" in text
    _, csv_only = run("growth", str(FLOWS / "z2_unipotent.json"), "--N", "12", "--format", "csv")
    assert csv_only.startswith("n,gamma,")


@pytest.mark.parametrize("file, check", [
    ("bernoulli_z2.json", "weiss"),
    ("left_shift_z2.json", "ent_star"),
    ("successor.json", "shift"),
])
def test_bridge_command(file, check):
    code, report = run_json("bridge", str(FLOWS / file), "--check", check)
    assert code == 0
    reports = report["reports"] if "reports" in report else [report]
    assert all(r["status"] == "EQUAL" for r in reports)


def test_table_format_names_the_verdict():
    code, text = run("entropy", str(FLOWS / "bernoulli_z2.json"), "--kind", "alg")
    assert code == 0 and "ExactLimit" in text


def test_exit_codes(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"category": "direct_sum", "exponent": 2,\n "endomorphism": {"columns": [1]}}')
    assert run("entropy", str(broken), "--kind", "ent")[0] == 2
    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{"category": ')
    assert run("entropy", str(bad_json), "--kind", "ent")[0] == 2
    assert run("entropy", str(FLOWS / "matrix_fib.json"), "--kind", "set")[0] == 3
    assert run("entropy", str(FLOWS / "bernoulli_z2.json"), "--kind", "alg", "--budget", "30", "--cap", "1000")[0] == 4
    assert run("entropy", str(FLOWS / "bernoulli_z2.json"), "--kind", "alg", "--tolerance", "0.5")[0] == 2
    assert run("nonsense")[0] == 2


def test_parse_errors_carry_locations():
    with pytest.raises(DocumentError) as err:
        parse_flow_document('{"category": "z_lattice", "rank": 2, "endomorphism": {"matrix": [[1, 2], [3]]}}')
    assert err.value.location.startswith("$.endomorphism.matrix")
    with pytest.raises(DocumentError) as err:
        parse_flow_document('{\n  "category": "set",\n  oops\n}')
    assert "line 3" in err.value.location
    with pytest.raises(DocumentError):
        parse_flow_document('{"category": "teapot"}')


@given(st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=5),
    lambda children: st.lists(children, max_size=3) | st.dictionaries(st.text(max_size=4), children, max_size=3),
    max_leaves=10,
))
def test_canonical_json_round_trips(obj):
    text = canonical_json(obj)
    assert json.loads(text) == obj
    assert canonical_json(json.loads(text)) == text
