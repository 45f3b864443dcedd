import csv
import io
import json
import math

import pytest

from zollfinsler.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, UsageError, main, parse_grid, parse_tolerances
from zollfinsler.zoll import HParam, gauss_curvature


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_eval_unit_vector_at_pole_geodesic():
    code, text = run("eval", "--epsilon", "0.25", "--R", "0", "--v1", "0", "--v2", "1")
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["F"] == pytest.approx(1.0, abs=1e-12)
    assert set(report) >= {"epsilon", "R", "v1", "v2", "F", "residual", "hessian_eigs", "K"}
    assert min(report["hessian_eigs"]) > 0
    assert report["K"] == pytest.approx(1.0, abs=1e-3)


def test_eval_round_limit():
    code, text = run("eval", "--epsilon", "1e-9", "--R", "0.5", "--v1", "1", "--v2", "1")
    assert code == EXIT_OK
    assert json.loads(text)["F"] == pytest.approx(math.sqrt(1 + math.cos(0.5) ** 2), abs=1e-8)


@pytest.mark.parametrize(
    "argv",
    [
        ("eval", "--epsilon", "0.6"),
        ("eval", "--epsilon", "0"),
        ("eval", "--v1", "0", "--v2", "0"),
        ("eval", "--R", "1.5708"),
        ("indicatrix", "--grid-R", "0:1:0"),
        ("indicatrix", "--grid-R", "banana"),
        ("indicatrix", "--grid-R", "-1.6:1.6:3"),
        ("verify", "--tol", "nonsense=1"),
        ("verify", "--tol", "backward=-1"),
        ("verify", "--only", "nonsense"),
        ("geodesics", "--count", "0"),
        ("eval", "--format", "xml"),
        ("frobnicate",),
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_indicatrix_files(tmp_path):
    code, _ = run("indicatrix", "--epsilon", "0.25", "--grid-R", "-1:1:5", "--out", str(tmp_path))
    assert code == EXIT_OK
    curves = sorted(tmp_path.glob("indicatrix_*.csv"))
    assert len(curves) == 5
    header = curves[0].read_text().splitlines()[0]
    assert header == "r,v1,v2,implicit_residual,F_residual"
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["max_implicit_residual"] < 1e-8
    assert summary["max_F_residual"] < 1e-8


def test_indicatrix_round_case_is_ellipse(tmp_path):
    run("indicatrix", "--epsilon", "1e-12", "--grid-R", "0.6:0.6:1", "--format", "json", "--out", str(tmp_path))
    rows = json.loads((tmp_path / "indicatrix_000.json").read_text())
    k = math.cos(0.6) ** 2
    assert max(abs(r["v1"] ** 2 + r["v2"] ** 2 * k - 1) for r in rows) < 1e-10


def test_indicatrix_r_grid(tmp_path):
    code, _ = run("indicatrix", "--grid-R", "0.5:0.5:1", "--grid-r", "0:3.14:30", "--out", str(tmp_path))
    assert code == EXIT_OK
    lines = (tmp_path / "indicatrix_000.csv").read_text().splitlines()[1:]
    r = [float(line.split(",")[0]) for line in lines]
    assert min(r) >= 0.5 and max(r) <= math.pi - 0.5


def test_outputs_are_deterministic(tmp_path):
    for name in ("a", "b"):
        run("curvature-scan", "--samples", "6", "--points", "11", "--grid-R", "-0.8:0.8:2", "--out", str(tmp_path / name))
        run("indicatrix", "--grid-R", "-1:1:3", "--out", str(tmp_path / name / "ind"))
    for f in (tmp_path / "a").rglob("*"):
        if f.is_file():
            assert f.read_bytes() == (tmp_path / "b" / f.relative_to(tmp_path / "a")).read_bytes()


def test_csv_floats_round_trip(tmp_path):
    run("curvature-scan", "--samples", "3", "--points", "7", "--grid-R", "-0.5:0.5:2", "--out", str(tmp_path))
    with open(tmp_path / "gauss.csv") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        assert float(row["G"]) == gauss_curvature(HParam(0.25), float(row["x"]))


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epsilon": 1e-9, "R": 0.5, "v1": 1.0, "v2": 1.0}))
    _, text = run("eval", "--config", str(cfg))
    assert json.loads(text)["F"] == pytest.approx(math.sqrt(1 + math.cos(0.5) ** 2), abs=1e-8)
    _, text = run("eval", "--config", str(cfg), "--R", "0")
    report = json.loads(text)
    assert report["R"] == 0.0 and report["epsilon"] == 1e-9


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("eval", "--config", str(bad))[0] == EXIT_USAGE
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"colour": "red"}))
    assert run("eval", "--config", str(unknown))[0] == EXIT_USAGE
    assert run("eval", "--config", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_geodesics_closure_report(tmp_path):
    code, text = run("geodesics", "--epsilon", "0.25", "--count", "3", "--out", str(tmp_path))
    assert code == EXIT_OK
    rows = (tmp_path / "closure.csv").read_text().splitlines()[1:]
    assert len(rows) == 4
    defects = [float(r.split(",")[5]) for r in rows]
    assert defects[0] < 1e-6
    assert max(defects) < 1e-5


def test_geodesics_half_period_is_informational(tmp_path):
    code, text = run("geodesics", "--count", "2", "--length", str(math.pi), "--out", str(tmp_path))
    assert code == EXIT_OK
    assert "informational" in text
    rows = (tmp_path / "closure.csv").read_text().splitlines()[1:]
    assert all(float(r.split(",")[5]) > 1e-3 for r in rows)


def test_geodesics_tight_tolerance_fails(tmp_path):
    code, _ = run("geodesics", "--count", "2", "--tol", "closure=1e-16", "--out", str(tmp_path))
    assert code == EXIT_FAIL


def test_verify_subset_passes(tmp_path):
    code, text = run("verify", "--only", "gauss,signs,round", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert text.count("[PASS]") == 3
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] and len(report["checks"]) == 3


def test_verify_boundary_epsilon():
    code, text = run("verify", "--epsilon", "0.49", "--only", "gauss,implicit,signs")
    assert code == EXIT_OK, text


def test_verify_forced_failure_reports_margin():
    code, text = run("verify", "--only", "curvature", "--tol", "flag_curvature=1e-15")
    assert code == EXIT_FAIL
    assert "[FAIL]" in text and "tol 1.0e-15" in text


def test_curvature_scan(tmp_path):
    code, text = run("curvature-scan", "--epsilon", "0.4", "--samples", "8", "--grid-R", "-1:1:2", "--out", str(tmp_path))
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["min_G"] > 0
    assert summary["max_abs_K_minus_1"] < 1e-3


def test_parse_grid():
    assert parse_grid("-1:1:5", "g") == (-1.0, 1.0, 5)
    assert parse_grid("0.5:0.5:1", "g") == (0.5, 0.5, 1)
    with pytest.raises(UsageError):
        parse_grid("1:0:3", "g")


def test_parse_tolerances():
    assert parse_tolerances(["backward=1e-9", "closure=2e-5"]) == {"backward": 1e-9, "closure": 2e-5}
    with pytest.raises(UsageError):
        parse_tolerances(["backward"])
