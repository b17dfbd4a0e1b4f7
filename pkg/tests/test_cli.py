"""Command-line layer: validation diagnostics, artifacts, exit codes, sweeps."""

import csv
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from qsl.cli import RunConfig, main, resolved_config, run, validate


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def lz_config(outdir, **overrides):
    params = dict(v=1.0, c=0.5, chi0=0.7854, chitau=2.3562, protocol="optimal")
    params.update(overrides)
    return RunConfig(scenario="lz", params=params, outdir=str(outdir))


# ------------------------------------------------------------- validation


def test_validate_names_missing_fields():
    diags = validate(RunConfig(scenario="lz", params={"c": 0.5}))
    assert any(d.startswith("lz.v:") and "missing" in d for d in diags)
    assert any(d.startswith("lz.chi0:") and "missing" in d for d in diags)


def test_validate_empty_for_a_good_config(tmp_path):
    assert validate(lz_config(tmp_path)) == []


def test_validate_flags_negative_trap_depth():
    diags = validate(RunConfig(scenario="transport", params={"d": 10.0, "U0": -5.0}))
    assert any(d.startswith("transport.U0:") and "positive" in d for d in diags)


def test_validate_rejects_unknown_field_and_scenario():
    diags = validate(RunConfig(scenario="jc", params={"gamma0": 1.0, "lambda0": 1.0, "bogus": 3}))
    assert any("jc.bogus" in d and "unknown" in d for d in diags)
    assert validate(RunConfig(scenario="warp", params={}))[0].startswith("scenario:")


def test_validate_angle_range():
    diags = validate(lz_config(".", chi0=4.2))
    assert any(d.startswith("lz.chi0:") for d in diags)


def test_validate_sweep_specs():
    bad = RunConfig(scenario="jc", params={"lambda0": 1.0},
                    sweep=["gamma0=1:100:1:log"])
    assert any("count" in d for d in validate(bad))
    bad2 = RunConfig(scenario="jc", params={"lambda0": 1.0},
                     sweep=["gamma0=-1:100:5:log"])
    assert any("log scale" in d for d in validate(bad2))
    bad3 = RunConfig(scenario="jc", params={"gamma0": 1.0, "lambda0": 1.0},
                     sweep=["chi0=0:1:5:linear"])
    assert any("not a sweepable" in d for d in validate(bad3))


def test_validate_swept_field_counts_as_provided():
    cfg = RunConfig(scenario="transport", params={"U0": 790.0},
                    sweep=["d=5:30:6:linear"])
    assert validate(cfg) == []
    # endpoints still have to pass the field's own range checks
    neg = RunConfig(scenario="transport", params={"U0": 790.0},
                    sweep=["d=-5:30:6:linear"])
    assert any(d.startswith("transport.d:") for d in validate(neg))


def test_validate_metric_point_arity():
    diags = validate(RunConfig(scenario="metric", params={"chart": "bloch", "point": [0.5]}))
    assert any("metric.point" in d for d in diags)
    ok = RunConfig(scenario="metric", params={"chart": "z", "point": [0.3]})
    assert validate(ok) == []


# ------------------------------------------------------ direct run() calls


def test_lz_run_writes_all_artifacts(tmp_path):
    cfg = lz_config(tmp_path)
    assert run(cfg) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["tau_qsl"] == pytest.approx(0.5 * math.pi, abs=1e-3)
    assert report["arrival_time"] == pytest.approx(0.5 * math.pi, abs=1e-3)
    assert report["residual_max"] < 1e-6
    header, rows = read_csv(tmp_path / "traj.csv")
    assert header == ["t", "chi", "phi", "eta", "V_global", "V_chi", "V_phi", "residual"]
    assert len(rows) > 1000
    svg = (tmp_path / "plot.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_lz_azimuth_pinned_between_kicks(tmp_path):
    cfg = lz_config(tmp_path)
    run(cfg)
    _, rows = read_csv(tmp_path / "traj.csv")
    phi = np.array([float(r[2]) for r in rows])
    assert np.max(np.abs(phi + 0.5 * math.pi)) < 1e-6


def test_csv_uses_crlf_and_full_precision(tmp_path):
    run(lz_config(tmp_path))
    raw = (tmp_path / "traj.csv").read_bytes()
    assert raw.count(b"\r\n") == raw.count(b"\n")
    _, rows = read_csv(tmp_path / "traj.csv")
    # 17 significant digits survive a float round trip
    val = rows[500][1]
    assert float(val) == float(f"{float(val):.17g}")


def test_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(lz_config(a))
    run(lz_config(b))
    for name in ("traj.csv", "report.json", "plot.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_report_embeds_a_reproducing_config(tmp_path):
    first = tmp_path / "first"
    run(lz_config(first))
    embedded = json.loads((first / "report.json").read_text())["config"]
    second = tmp_path / "second"
    cfg = RunConfig(scenario=embedded["scenario"], params=embedded["params"],
                    outdir=str(second), sweep=embedded["sweep"])
    assert validate(cfg) == []
    run(cfg)
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()


def test_emit_switches_suppress_artifacts(tmp_path):
    cfg = lz_config(tmp_path)
    cfg.emit = {"csv": True, "json": True, "svg": False}
    run(cfg)
    assert (tmp_path / "traj.csv").exists()
    assert not (tmp_path / "plot.svg").exists()


def test_resolved_config_fills_schema_defaults(tmp_path):
    cfg = lz_config(tmp_path)
    resolved = resolved_config(cfg)
    assert resolved["params"]["dt"] == 1e-3
    assert resolved["params"]["phi0"] == 0.0
    assert resolved["params"]["tmax"] is None  # derived at execution time


def test_jc_run_report_and_series(tmp_path):
    cfg = RunConfig(scenario="jc", params={"gamma0": 0.01, "lambda0": 1.0, "tmax": 500.0},
                    outdir=str(tmp_path))
    assert validate(cfg) == []
    run(cfg)
    report = json.loads((tmp_path / "report.json").read_text())
    assert abs(report["tau_qsl"] - 100.0) / 100.0 < 0.05
    assert report["regime"] == "weak"
    assert report["non_markovianity"] == 0.0
    header, rows = read_csv(tmp_path / "traj.csv")
    assert header == ["t", "gamma", "rho11", "sigma", "z"]
    assert float(rows[0][2]) == 1.0


def test_transport_formula_mode(tmp_path):
    cfg = RunConfig(scenario="transport",
                    params={"mode": "formula", "d": 20.0, "U0": 790.0},
                    outdir=str(tmp_path))
    run(cfg)
    report = json.loads((tmp_path / "report.json").read_text())
    dx = report["dx_spread"]
    expected = math.sqrt(1.0 * 1.0 * 20.0 / (4.0 * math.pi**2 * 790.0 * dx))
    assert report["tau_qsl"] == pytest.approx(expected, rel=1e-12)


def test_transport_given_k2_mode(tmp_path):
    cfg = RunConfig(scenario="transport",
                    params={"mode": "given-k2", "d": 10.0, "dx_spread": 0.1, "k2": 25.0},
                    outdir=str(tmp_path))
    run(cfg)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["tau_qsl"] == pytest.approx((10.0 / 0.2) / 5.0, rel=1e-12)


def test_metric_run_reports_tensor(tmp_path):
    cfg = RunConfig(scenario="metric",
                    params={"chart": "bloch", "point": [0.7854, 0.4]},
                    outdir=str(tmp_path))
    run(cfg)
    report = json.loads((tmp_path / "report.json").read_text())
    g = np.array(report["metric"])
    assert g.shape == (2, 2)
    assert g[0][0] == pytest.approx(0.25, rel=1e-12)
    assert min(report["eigenvalues"]) > 0
    header, rows = read_csv(tmp_path / "metric.csv")
    assert header == ["i", "j", "g_ij"]
    assert len(rows) == 4


# ----------------------------------------------------------------- sweeps


def test_sweep_rows_follow_grid_order(tmp_path):
    cfg = RunConfig(scenario="jc", params={"lambda0": 1.0}, outdir=str(tmp_path),
                    sweep=["gamma0=1:100:5:log"])
    run(cfg)
    header, rows = read_csv(tmp_path / "sweep.csv")
    gammas = [float(r[0]) for r in rows]
    assert gammas == sorted(gammas)
    assert gammas[0] == pytest.approx(1.0) and gammas[-1] == pytest.approx(100.0)
    tau = [float(r[header.index("tau_qsl")]) for r in rows]
    assert tau == sorted(tau, reverse=True)  # stronger coupling, tighter bound


def test_sweep_product_is_row_major(tmp_path):
    cfg = RunConfig(scenario="jc", params={}, outdir=str(tmp_path),
                    sweep=["gamma0=0.01:0.02:2:linear", "lambda0=1:2:2:linear"])
    run(cfg)
    header, rows = read_csv(tmp_path / "sweep.csv")
    combos = [(float(r[0]), float(r[1])) for r in rows]
    assert combos == [(0.01, 1.0), (0.01, 2.0), (0.02, 1.0), (0.02, 2.0)]


def test_parallel_sweep_matches_serial(tmp_path):
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    base = dict(scenario="jc", params={"lambda0": 1.0}, sweep=["gamma0=1:100:4:log"])
    run(RunConfig(outdir=str(serial), **base))
    run(RunConfig(outdir=str(parallel), workers=2, **base))
    assert (serial / "sweep.csv").read_bytes() == (parallel / "sweep.csv").read_bytes()


def test_transport_sweep_recovers_square_root_scaling(tmp_path):
    cfg = RunConfig(scenario="transport", params={"U0": 790.0}, outdir=str(tmp_path),
                    sweep=["d=5:30:6:linear"])
    run(cfg)
    header, rows = read_csv(tmp_path / "sweep.csv")
    d = np.array([float(r[0]) for r in rows])
    tau = np.array([float(r[header.index("tau_qsl")]) for r in rows])
    slope = np.polyfit(np.log(d), np.log(tau), 1)[0]
    assert slope == pytest.approx(0.5, abs=1e-12)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["params"]["mode"] == "formula"


# ------------------------------------------------------------- exit codes


def test_cli_happy_path_exits_zero(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, [
        "lz", "--v", "1", "--c", "0.5", "--chi0", "0.7854", "--chitau", "2.3562",
        "--protocol", "optimal", "--outdir", str(tmp_path)])
    assert result.exit_code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["tau_qsl"] == pytest.approx(1.5708, abs=1e-3)


def test_cli_invalid_config_exits_two():
    runner = CliRunner()
    result = runner.invoke(main, ["lz", "--c", "0.5"])
    assert result.exit_code == 2
    assert "lz.v" in result.stderr


def test_cli_numeric_domain_exits_three(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, [
        "lz", "--v", "1", "--chi0", "1e-18", "--phi0", "0",
        "--protocol", "constant", "--gamma0", "0", "--tmax", "1",
        "--outdir", str(tmp_path)])
    assert result.exit_code == 3
    assert "numeric domain" in result.stderr


def test_cli_config_file_with_flag_override(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "scenario": "jc",
        "params": {"gamma0": 0.01, "lambda0": 1.0, "tmax": 500.0},
        "sweep": [],
    }))
    runner = CliRunner()
    out = tmp_path / "out"
    result = runner.invoke(main, [
        "jc", "--config", str(cfg_file), "--gamma0", "50", "--tmax", "0",
        "--outdir", str(out)])
    # the override sends tmax out of range: flags must win over the file
    assert result.exit_code == 2
    assert "jc.tmax" in result.stderr
    result = runner.invoke(main, [
        "jc", "--config", str(cfg_file), "--gamma0", "50", "--tmax", "3",
        "--outdir", str(out)])
    assert result.exit_code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["regime"] == "strong"


def test_cli_sweep_subcommand(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, [
        "sweep", "transport", "--param", "d=5:30:6:linear",
        "--u0", "790", "--outdir", str(tmp_path)])
    assert result.exit_code == 0
    header, rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 6
    assert "tau_qsl" in header
