import io

from semient.cli import main
from semient.selftest import (
    CatalogEntry, check_norm_bound, check_subadditivity, model_catalog, run_battery,
)
from semient.semigroup import NormedSemigroupModel, identity_endomorphism


def test_battery_passes_and_tags_every_clause():
    results = run_battery(seed=0)
    assert all(r.passed for r in results), [r.line() for r in results if not r.passed]
    assert {r.clause for r in results if r.clause} == set("abcde")
    assert len(results) >= 2 * len(model_catalog())


def test_battery_is_stable_across_seeds():
    for seed in (1, 2):
        assert all(r.passed for r in run_battery(seed=seed))


def test_checks_detect_a_broken_norm():
    # v(x) = x^2 on (N, +) is not subadditive, and its entropy escapes v(x)
    broken = NormedSemigroupModel(op=lambda a, b: a + b, norm=lambda x: x * x, name="square")
    entry = CatalogEntry("square", broken, identity_endomorphism(), [1, 2], budget=8)
    assert not check_subadditivity(entry).passed
    assert not check_norm_bound(entry).passed


def test_result_lines():
    line = run_battery()[0].line()
    assert line.startswith("PASS subadditivity")


def test_cli_selftest_exit_code():
    out = io.StringIO()
    assert main(["selftest"], out=out) == 0
    assert "FAIL" not in out.getvalue()
