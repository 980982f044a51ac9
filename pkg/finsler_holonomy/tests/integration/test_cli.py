"""End-to-end tests of the finsler-holonomy command line."""

import json
from pathlib import Path

import pytest

from finsler_holonomy.app import main
from finsler_holonomy.models import RunConfig
from finsler_holonomy.orchestration import AnalysisPipeline, render_json

DATA = Path(__file__).resolve().parent.parent / "data"


def _run(tmp_path, *argv, name="report.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def _load(path):
    return json.loads(path.read_text(encoding="utf-8"))["deterministic"]


def _section(report, name):
    return next(s for s in report["sections"] if s["name"] == name)


def test_analyze_euclidean(tmp_path):
    code, out = _run(tmp_path, "analyze", "--kernel", "euclidean", "--samples", "20", "--depth", "2")
    assert code == 0
    report = _load(out)
    assert _section(report, "curvature_fit")["data"]["c_estimate"] == pytest.approx(0.0, abs=1e-12)
    assert _section(report, "riemannian_test")["data"]["is_semi_riemannian"]
    assert _section(report, "algebra")["data"]["rank"] == 0


def test_analyze_sphere(tmp_path):
    code, out = _run(tmp_path, "analyze", "--kernel", "sphere", "--samples", "30", "--depth", "2")
    assert code == 0
    report = _load(out)
    assert _section(report, "curvature_fit")["data"]["c_estimate"] == pytest.approx(1.0, abs=1e-6)
    assert _section(report, "algebra")["data"]["rank"] == 3


def test_analyze_is_deterministic():
    config = RunConfig(kernel="sphere", sample_count=20, seed=11, depth=2)
    first = render_json(AnalysisPipeline(config).run_analyze(), include_timings=False)
    second = render_json(AnalysisPipeline(config).run_analyze(), include_timings=False)
    assert first == second


def test_config_file_and_overrides(tmp_path):
    code, out = _run(tmp_path, "analyze", "--config", str(DATA / "run_sphere.json"), "--depth", "1")
    assert code == 0
    report = _load(out)
    assert report["config"]["kernel"] == "sphere"
    assert report["config"]["sample_count"] == 30
    assert report["config"]["depth"] == 1


def test_riemannian_file_kernel(tmp_path):
    kernel = f"riemannian:{DATA / 'flat_plane.json'}"
    code, out = _run(tmp_path, "analyze", "--kernel", kernel, "--samples", "20", "--depth", "2")
    assert code == 0
    assert _section(_load(out), "algebra")["data"]["rank"] == 0


def test_unknown_config_key(capsys):
    assert main(["analyze", "--config", str(DATA / "run_unknown_key.json")]) == 2
    assert "Configuration error" in capsys.readouterr().err


def test_unknown_kernel(tmp_path):
    code, out = _run(tmp_path, "analyze", "--kernel", "not-a-kernel")
    assert code == 2
    assert _load(out)["error"]["kind"] == "ConfigurationError"


def test_bad_flag_values():
    with pytest.raises(SystemExit) as excinfo:
        main(["analyze", "--format", "yaml"])
    assert excinfo.value.code == 2
    assert main(["analyze", "--samples", "0"]) == 2
    assert main(["analyze", "--point", "1,a"]) == 2


def test_transport_euclidean_square(tmp_path):
    code, out = _run(
        tmp_path,
        "transport",
        "--kernel",
        "euclidean",
        "--curve",
        "square(plane=12, side=0.2)",
        "--samples",
        "5",
        "--steps",
        "20",
    )
    assert code == 0
    data = _section(_load(out), "transport")["data"]
    assert data["closed"] is True
    assert data["reference_error"] < 1e-12
    assert data["max_drift"] < 1e-12


def test_transport_sphere_octant(tmp_path):
    code, out = _run(
        tmp_path, "transport", "--kernel", "sphere", "--curve", "octant", "--samples", "8", "--steps", "400"
    )
    assert code == 0
    data = _section(_load(out), "transport")["data"]
    assert data["curve"] == "octant"
    assert data["reference_error"] < 1e-5


def test_transport_leaving_cone(tmp_path):
    code, out = _run(
        tmp_path, "transport", "--kernel", "funk", "--curve", "polyline:[[0,0,0],[2,0,0]]", "--samples", "3"
    )
    assert code == 3
    assert _load(out)["error"]["kind"] == "TransportDomainError"


def test_transport_without_curve(capsys):
    assert main(["transport", "--kernel", "euclidean", "--format", "text"]) == 2
    assert "Transport needs a curve" in capsys.readouterr().out


def test_transport_malformed_anchor(capsys):
    code = main(
        [
            "transport",
            "--kernel",
            "sphere",
            "--curve",
            "square(plane=12, side=0.1, anchor=[0.1,,0])",
            "--steps",
            "8",
            "--format",
            "text",
        ]
    )
    assert code == 2
    assert "anchor" in capsys.readouterr().out


def test_csv_output(tmp_path):
    code, out = _run(
        tmp_path, "analyze", "--kernel", "sphere", "--samples", "20", "--depth", "2", "--format", "csv", name="ranks.csv"
    )
    assert code == 0
    assert out.read_text(encoding="utf-8").splitlines()[0] == "depth,fields,rank"


def test_bare_output_name_uses_output_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("FINSLER_HOLONOMY_OUTPUT_DIR", str(tmp_path / "reports"))
    assert main(["analyze", "--kernel", "euclidean", "--samples", "20", "--depth", "1", "--out", "bare.json"]) == 0
    assert (tmp_path / "reports" / "bare.json").exists()


@pytest.mark.slow
def test_verify_appendix_passes(tmp_path):
    code, out = _run(tmp_path, "verify-appendix")
    assert code == 0
    report = _load(out)
    evidence = _section(report, "infinite_dim_evidence")["data"]
    assert evidence["strictly_increasing"]
    assert [row["rank"] for row in evidence["rows"]][0] == 3


@pytest.mark.slow
def test_verify_appendix_sign_flip(tmp_path):
    code, out = _run(tmp_path, "verify-appendix", "--inject-sign-flip", "13")
    assert code == 1
    report = _load(out)
    assert report["error"]["check"] == "golden_values"
    assert _section(report, "appendix_checks")["data"]["checks"][0]["passed"] is False
    assert _section(report, "infinite_dim_evidence")["status"] == "skipped"


@pytest.mark.slow
def test_verify_appendix_tight_oracle_tolerance(tmp_path):
    code, out = _run(tmp_path, "verify-appendix", "--method", "fd", "--tol", "1e-12")
    assert code == 1
    assert _load(out)["error"]["check"] == "oracle_consistency"
