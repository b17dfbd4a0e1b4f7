"""Command-line front end: scenario runs, parameter sweeps, CSV/JSON/SVG artifacts.

Config can come from a JSON file (--config) and/or flat flags; flags override
file values. Every report.json embeds the resolved scientific config
(scenario, params, sweep) so a run can be reproduced from its own report;
output directory and emit switches are delivery options and stay out of it.
Exit codes: 0 ok, 2 invalid config (field diagnostics on stderr), 3 numeric
domain error (scenario context on stderr).
"""

import csv as _csvmod
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from typing import Optional

import click
import numpy as np

from . import _svg
from .bounds import evaluate_bounds
from .geometry import (
    ContractViolation,
    SingularEigenvalueError,
    bloch_pure_chart,
    metric_tensor_mixed,
    metric_tensor_pure,
    qubit_diagonal_chart,
    qubit_z_chart,
)
from .jaynes_cummings import (
    DomainEndError,
    JcParams,
    ToleranceError,
    non_markovianity,
    qsl_jc,
)
from .jaynes_cummings import trajectory as jc_trajectory
from .landau_zener import (
    Constant,
    InfeasibleQuadratureError,
    IntegrationError,
    LzParams,
    OptimalFeedback,
    PoleError,
    TimeSeries,
    _c0,
    integrate,
    optimal_protocol,
    qsl_time_lz,
)
from .transport import (
    GridTooSmallError,
    harmonic_frequency,
    local_bound_transport,
    qsl_conveyor,
    qsl_conveyor_run,
    qsl_transport_global,
)

NUMERIC_DOMAIN_ERRORS = (
    PoleError,
    InfeasibleQuadratureError,
    IntegrationError,
    DomainEndError,
    ToleranceError,
    GridTooSmallError,
    SingularEigenvalueError,
    ContractViolation,
)

SCENARIOS = ("lz", "transport", "jc", "metric")

# fields whose defaults derive from other fields stay None in the resolved
# config and are materialized deterministically at execution time
_SCHEMAS = {
    "lz": {
        "v": dict(required=True, default=None),
        "c": dict(default=0.0),
        "chi0": dict(required=True, default=None),
        "chitau": dict(default=None),
        "phi0": dict(default=0.0),
        "protocol": dict(default="optimal"),
        "gamma0": dict(default=0.0),
        "gamma_t": dict(default=None),
        "gamma_values": dict(default=None),
        "tmax": dict(default=None),
        "dt": dict(default=1e-3),
    },
    "transport": {
        "mode": dict(default="simulate"),
        "d": dict(required=True, default=None),
        "U0": dict(default=None),
        "wavelength": dict(default=1.0),
        "m": dict(default=1.0),
        "dx_spread": dict(default=None),
        "k2": dict(default=None),
        "T": dict(default=None),
        "n_grid": dict(default=4096),
        "padding": dict(default=16.0),
        "dt": dict(default=None),
        "sample_every": dict(default=20),
    },
    "jc": {
        "gamma0": dict(required=True, default=None),
        "lambda0": dict(required=True, default=None),
        "omega0": dict(default=0.0),
        "tmax": dict(default=None),
        "n_samples": dict(default=400),
    },
    "metric": {
        "chart": dict(default="bloch"),
        "point": dict(required=True, default=None),
    },
}

_SWEEPABLE = {
    "lz": {"v", "c", "chi0", "chitau", "phi0", "gamma0", "tmax", "dt"},
    "transport": {"d", "U0", "wavelength", "m", "dx_spread", "k2", "T", "padding"},
    "jc": {"gamma0", "lambda0", "omega0", "tmax"},
    "metric": set(),
}


@dataclass
class RunConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    outdir: str = "."
    emit: dict = field(default_factory=lambda: {"csv": True, "json": True, "svg": True})
    sweep: list = field(default_factory=list)  # ["name=min:max:count:scale", ...]
    workers: int = 1


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _parse_sweep_spec(spec):
    """name=min:max:count:scale -> (name, values list); raises ValueError."""
    name, _, rng = spec.partition("=")
    parts = rng.split(":")
    if not name or len(parts) != 4:
        raise ValueError("expected name=min:max:count:{linear|log}")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[2])
    scale = parts[3]
    if count < 2:
        raise ValueError("count must be at least 2")
    if scale not in ("linear", "log"):
        raise ValueError("scale must be linear or log")
    if scale == "log" and (lo <= 0 or hi <= 0):
        raise ValueError("log scale needs positive endpoints")
    vals = np.geomspace(lo, hi, count) if scale == "log" else np.linspace(lo, hi, count)
    return name, [float(v) for v in vals]


def _param_diags(sc: str, p: dict) -> list:
    """Per-field diagnostics for one concrete parameter set."""
    diags = []
    schema = _SCHEMAS[sc]
    for name in p:
        if name not in schema:
            diags.append(f"{sc}.{name}: unknown field")
    for name, meta in schema.items():
        if meta.get("required") and p.get(name) is None:
            diags.append(f"{sc}.{name}: required field is missing")

    def check_pos(name, allow_none=True):
        v = p.get(name)
        if v is None:
            if not allow_none:
                diags.append(f"{sc}.{name}: required field is missing")
            return
        if not _is_num(v) or v <= 0:
            diags.append(f"{sc}.{name}: must be a positive number, got {v!r}")

    if sc == "lz":
        check_pos("v")
        check_pos("dt")
        check_pos("tmax")
        if p.get("c") is not None and not _is_num(p["c"]):
            diags.append(f"lz.c: must be a number, got {p['c']!r}")
        for ang in ("chi0", "chitau"):
            v = p.get(ang)
            if v is not None and (not _is_num(v) or not 0.0 <= v <= math.pi):
                diags.append(f"lz.{ang}: must lie in [0, π], got {v!r}")
        proto = p.get("protocol", "optimal")
        if proto not in ("optimal", "constant", "timeseries"):
            diags.append(f"lz.protocol: unknown protocol {proto!r}")
        if proto == "optimal" and p.get("chitau") is None:
            diags.append("lz.chitau: required by the optimal protocol")
        if proto == "timeseries":
            ts, gs = p.get("gamma_t"), p.get("gamma_values")
            if not isinstance(ts, (list, tuple)) or not isinstance(gs, (list, tuple)) \
                    or len(ts) != len(gs) or len(ts) < 2:
                diags.append("lz.gamma_t/gamma_values: need two equal-length lists (≥2 samples)")
            elif any(b <= a for a, b in zip(ts, ts[1:])):
                diags.append("lz.gamma_t: sample times must be strictly increasing")
    elif sc == "transport":
        mode = p.get("mode", "simulate")
        if mode not in ("simulate", "formula", "given-k2"):
            diags.append(f"transport.mode: unknown mode {mode!r}")
        check_pos("d")
        check_pos("wavelength")
        check_pos("m")
        check_pos("T")
        check_pos("dt")
        check_pos("dx_spread")
        check_pos("padding")
        if mode in ("simulate", "formula"):
            if p.get("U0") is None:
                diags.append("transport.U0: required field is missing")
            else:
                check_pos("U0")
        if mode == "given-k2":
            if p.get("k2") is None:
                diags.append("transport.k2: required by given-k2 mode")
            else:
                check_pos("k2")
            if p.get("dx_spread") is None and p.get("U0") is None:
                diags.append("transport.dx_spread: required by given-k2 mode (or give U0)")
        n = p.get("n_grid", 4096)
        if not isinstance(n, int) or n < 256 or n & (n - 1):
            diags.append(f"transport.n_grid: must be a power of two ≥ 256, got {n!r}")
        se = p.get("sample_every", 20)
        if not isinstance(se, int) or se < 1:
            diags.append(f"transport.sample_every: must be a positive integer, got {se!r}")
    elif sc == "jc":
        check_pos("gamma0")
        check_pos("lambda0")
        check_pos("tmax")
        if p.get("omega0") is not None and not _is_num(p["omega0"]):
            diags.append(f"jc.omega0: must be a number, got {p['omega0']!r}")
        ns = p.get("n_samples", 400)
        if not isinstance(ns, int) or ns < 16:
            diags.append(f"jc.n_samples: must be an integer ≥ 16, got {ns!r}")
    elif sc == "metric":
        chart = p.get("chart", "bloch")
        if chart not in ("bloch", "population", "z"):
            diags.append(f"metric.chart: unknown chart {chart!r}")
        pt = p.get("point")
        if pt is not None:
            if not isinstance(pt, (list, tuple)) or not all(_is_num(v) for v in pt):
                diags.append("metric.point: must be a list of numbers")
            elif chart == "bloch" and len(pt) != 2:
                diags.append("metric.point: bloch chart needs [chi, phi]")
            elif chart in ("population", "z") and len(pt) != 1:
                diags.append(f"metric.point: {chart} chart needs a single coordinate")
            elif chart == "bloch" and not 0.0 < pt[0] < math.pi:
                diags.append(f"metric.point: chi must lie inside (0, π), got {pt[0]!r}")
            elif chart == "population" and not 0.0 < pt[0] < 1.0:
                diags.append(f"metric.point: population must lie inside (0, 1), got {pt[0]!r}")
            elif chart == "z" and not -1.0 < pt[0] < 1.0:
                diags.append(f"metric.point: z must lie inside (−1, 1), got {pt[0]!r}")
    return diags


def validate(config: RunConfig) -> list:
    """Field diagnostics; empty iff run() would not reject the config."""
    diags = []
    sc = config.scenario
    if sc not in SCENARIOS:
        return [f"scenario: unknown scenario {sc!r} (expected one of {', '.join(SCENARIOS)})"]

    swept = {}
    for spec in config.sweep:
        try:
            name, vals = _parse_sweep_spec(spec)
        except ValueError as err:
            diags.append(f"sweep.{spec!r}: {err}")
            continue
        if name not in _SWEEPABLE[sc]:
            diags.append(f"sweep.{name}: not a sweepable {sc} parameter")
        else:
            swept[name] = (vals[0], vals[-1])
    if config.sweep and sc == "metric":
        diags.append("sweep: the metric scenario does not support sweeps")

    # a swept field counts as provided; both endpoints must pass its checks
    if swept:
        lo, hi = dict(config.params), dict(config.params)
        for name, (a, b) in swept.items():
            lo[name], hi[name] = a, b
        variants = [lo, hi]
    else:
        variants = [config.params]
    for p in variants:
        diags.extend(_param_diags(sc, p))
    diags = list(dict.fromkeys(diags))
    for key, val in config.emit.items():
        if key not in ("csv", "json", "svg") or not isinstance(val, bool):
            diags.append(f"emit.{key}: emit flags are booleans csv/json/svg")
    if config.workers is not None and (not isinstance(config.workers, int) or config.workers < 1):
        diags.append(f"workers: must be a positive integer, got {config.workers!r}")
    return diags


def _resolved_params(config: RunConfig) -> dict:
    schema = _SCHEMAS[config.scenario]
    out = {}
    for name, meta in schema.items():
        val = config.params.get(name, meta["default"])
        if isinstance(val, tuple):
            val = list(val)
        out[name] = val
    return out


def resolved_config(config: RunConfig, params: Optional[dict] = None) -> dict:
    return {
        "scenario": config.scenario,
        "params": params if params is not None else _resolved_params(config),
        "sweep": list(config.sweep),
    }


# ------------------------------------------------------------------ writers


def _fmt_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csvmod.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    return obj


def _write_json(path, obj):
    text = json.dumps(_json_safe(obj), sort_keys=True, indent=2, ensure_ascii=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _emit(config, base, header=None, rows=None, report=None, svg_series=None,
          svg_labels=("", "", "")):
    os.makedirs(config.outdir, exist_ok=True)
    written = []
    if config.emit.get("csv", True) and header is not None:
        path = os.path.join(config.outdir, f"{base}.csv")
        _write_csv(path, header, rows or [])
        written.append(path)
    if config.emit.get("json", True) and report is not None:
        path = os.path.join(config.outdir, "report.json")
        _write_json(path, report)
        written.append(path)
    if config.emit.get("svg", True) and svg_series:
        path = os.path.join(config.outdir, "plot.svg")
        title, xlabel, ylabel = svg_labels
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_svg.line_chart(svg_series, title=title, xlabel=xlabel, ylabel=ylabel))
        written.append(path)
    return written


# ---------------------------------------------------------------- scenarios


def _lz_build(params):
    proto_name = params["protocol"]
    if proto_name == "constant":
        protocol = Constant(params["gamma0"])
    elif proto_name == "timeseries":
        protocol = TimeSeries(t=np.asarray(params["gamma_t"], dtype=float),
                              gamma=np.asarray(params["gamma_values"], dtype=float))
    else:
        protocol = Constant(0.0)  # replaced by optimal_protocol below
    base = LzParams(v=params["v"], c=params["c"], protocol=protocol)
    if proto_name == "optimal":
        return optimal_protocol(base, chi0=params["chi0"], chi_tau=params["chitau"],
                                phi0=params["phi0"])
    return base


def _lz_tmax(params):
    if params["tmax"] is not None:
        return params["tmax"]
    if params["chitau"] is not None:
        return 5.0 * (abs(params["chitau"] - params["chi0"]) + 0.5) / params["v"]
    return 10.0 / params["v"]


def _residual_series(traj, params):
    chi = traj.lam[:, 0]
    phi = traj.lam[:, 1]
    c0 = _c0(params, float(chi[0]), float(phi[0]))
    F = np.asarray(traj.extras["F"], dtype=float)
    s = np.sin(chi)
    f = (2.0 * F + c0) / s**2
    return np.abs(s * (params.c + f) + 2.0 * params.v * np.cos(phi))


def _run_lz(config, params):
    lzp = _lz_build(params)
    traj = integrate(lzp, chi0=params["chi0"], phi0=params["phi0"],
                     t_max=_lz_tmax(params), dt=params["dt"],
                     chi_target=params["chitau"])
    rep = evaluate_bounds(traj, bloch_pure_chart())
    residual = _residual_series(traj, lzp)
    chi, phi = traj.lam[:, 0], traj.lam[:, 1]
    rows = zip(traj.t, chi, phi, traj.extras["eta"], traj.extras["V_global"],
               traj.speeds[:, 0], traj.speeds[:, 1], residual)
    report = {
        "config": resolved_config(config),
        "scenario": "lz",
        "report": rep.to_dict(),
        "tau_qsl": rep.tau_qsl,
        "elapsed": traj.elapsed,
        "arrival_time": traj.extras["arrival_time"],
        "residual_max": float(np.max(residual)),
    }
    if params["chitau"] is not None:
        report["tau_formula"] = qsl_time_lz(params["v"], params["chi0"], params["chitau"])
    _emit(config, "traj",
          header=["t", "chi", "phi", "eta", "V_global", "V_chi", "V_phi", "residual"],
          rows=rows, report=report,
          svg_series=[("chi", traj.t, chi), ("phi", traj.t, phi)],
          svg_labels=("Bloch angles along the protocol", "t", "angle (rad)"))
    return 0


def _transport_resolved(params):
    """Fill the derived transport defaults (dx_spread, T, dt)."""
    out = dict(params)
    if out["U0"] is not None:
        omega = harmonic_frequency(out["U0"], out["m"], out["wavelength"])
        if out["dx_spread"] is None:
            out["dx_spread"] = math.sqrt(1.0 / (2.0 * out["m"] * omega))
        if out["T"] is None:
            out["T"] = 20.0 * qsl_conveyor(out["m"], out["wavelength"], out["U0"],
                                           out["dx_spread"], out["d"])
        if out["dt"] is None:
            out["dt"] = 1e-3 * 2.0 * math.pi / omega
    return out


def _run_transport(config, params):
    p = _transport_resolved(params)
    report = {"config": resolved_config(config), "scenario": "transport", "mode": p["mode"]}
    if p["mode"] == "given-k2":
        tau = qsl_transport_global(p["d"], p["dx_spread"], math.sqrt(p["k2"]))
        report.update({"tau_qsl": tau, "d": p["d"], "K2": p["k2"], "dx_spread": p["dx_spread"]})
        _emit(config, "traj", header=["d", "K2", "tau"], rows=[(p["d"], p["k2"], tau)],
              report=report)
        return 0
    if p["mode"] == "formula":
        tau = qsl_conveyor(p["m"], p["wavelength"], p["U0"], p["dx_spread"], p["d"])
        tau_local = local_bound_transport(p["m"], p["wavelength"], p["U0"])
        report.update({
            "tau_qsl": tau,
            "tau_local": tau_local,
            "dx_spread": p["dx_spread"],
            "omega_ho": harmonic_frequency(p["U0"], p["m"], p["wavelength"]),
        })
        _emit(config, "traj", header=["d", "dx_spread", "tau_local", "tau_qsl"],
              rows=[(p["d"], p["dx_spread"], tau_local, tau)], report=report)
        return 0
    trep, samples = qsl_conveyor_run(
        d=p["d"], T=p["T"], U0=p["U0"], wavelength=p["wavelength"], m=p["m"],
        n_grid=p["n_grid"], padding=p["padding"], dt=p["dt"],
        sample_every=p["sample_every"])
    report.update({
        "report": trep.to_dict(),
        "tau_qsl": trep.tau_qsl,
        "elapsed": p["T"],
        "tau_formula": qsl_conveyor(p["m"], p["wavelength"], p["U0"], p["dx_spread"], p["d"]),
        "omega_ho": harmonic_frequency(p["U0"], p["m"], p["wavelength"]),
    })
    cols = ["t", "x_control", "Dx", "Dp", "K2", "DU", "fs_speed_direct", "fs_speed_formula"]
    rows = zip(*(samples[c] for c in cols))
    _emit(config, "traj", header=cols, rows=rows, report=report,
          svg_series=[("fs_speed_direct", samples["t"], samples["fs_speed_direct"]),
                      ("fs_speed_formula", samples["t"], samples["fs_speed_formula"])],
          svg_labels=("Transport speed: direct vs formula", "t", "speed"))
    return 0


def _run_jc(config, params):
    jcp = JcParams(gamma0=params["gamma0"], lambda0=params["lambda0"],
                   omega0=params["omega0"])
    result = qsl_jc(jcp, t_max=params["tmax"])
    t_max = params["tmax"]
    if t_max is None:
        t_max = 0.999 * jcp.domain_end if jcp.regime == "strong" else (
            60.0 / jcp.lambda0 if jcp.regime == "critical"
            else 60.0 / (jcp.lambda0 - jcp.D))
    traj = jc_trajectory(jcp, t_max=t_max, n_samples=params["n_samples"])
    pop = traj.lam[:, 0]
    report = {
        "config": resolved_config(config),
        "scenario": "jc",
        "report": result.report.to_dict(),
        "tau_qsl": result.tau_qsl,
        "sigma_max": result.sigma_max,
        "t_sigma_max": result.t_sigma_max,
        "tau_weak_formula": result.tau_weak_formula,
        "tau_strong_formula": result.tau_strong_formula,
        "regime": result.regime,
        "non_markovianity": non_markovianity(jcp),
    }
    rows = zip(traj.t, traj.extras["gamma"], pop, traj.extras["sigma"], traj.extras["z"])
    _emit(config, "traj", header=["t", "gamma", "rho11", "sigma", "z"], rows=rows,
          report=report,
          svg_series=[("rho11", traj.t, pop), ("sigma", traj.t, traj.extras["sigma"])],
          svg_labels=("Excited population and information flow", "t", "value"))
    return 0


def _run_metric(config, params):
    chart_name = params["chart"]
    lam = np.asarray(params["point"], dtype=float)
    if chart_name == "bloch":
        g = metric_tensor_pure(bloch_pure_chart(), lam)
    elif chart_name == "population":
        g = metric_tensor_mixed(qubit_diagonal_chart(), lam)
    else:
        g = metric_tensor_mixed(qubit_z_chart(), lam)
    eigvals = [float(v) for v in np.linalg.eigvalsh(g.g)]
    report = {
        "config": resolved_config(config),
        "scenario": "metric",
        "chart": chart_name,
        "point": [float(v) for v in lam],
        "metric": [[float(v) for v in row] for row in g.g],
        "eigenvalues": eigvals,
    }
    rows = [(i, j, g.g[i, j]) for i in range(g.dim) for j in range(g.dim)]
    _emit(config, "metric", header=["i", "j", "g_ij"], rows=rows, report=report)
    return 0


# ------------------------------------------------------------------- sweeps


def _sweep_point(scenario, params):
    """One sweep grid point -> an output row dict. Must stay pickleable."""
    if scenario == "jc":
        jcp = JcParams(gamma0=params["gamma0"], lambda0=params["lambda0"],
                       omega0=params["omega0"])
        r = qsl_jc(jcp, t_max=params["tmax"])
        return {
            "gamma0": params["gamma0"],
            "lambda0": params["lambda0"],
            "tau_qsl": r.tau_qsl,
            "tau_weak_formula": r.tau_weak_formula,
            "tau_strong_formula": r.tau_strong_formula,
            "N": non_markovianity(jcp),
        }
    if scenario == "transport":
        p = _transport_resolved(params)
        if p["mode"] == "given-k2":
            tau = qsl_transport_global(p["d"], p["dx_spread"], math.sqrt(p["k2"]))
            return {"d": p["d"], "K2": p["k2"], "tau": tau, "tau_qsl": tau}
        if p["mode"] == "simulate":
            trep, _ = qsl_conveyor_run(
                d=p["d"], T=p["T"], U0=p["U0"], wavelength=p["wavelength"], m=p["m"],
                n_grid=p["n_grid"], padding=p["padding"], dt=p["dt"],
                sample_every=p["sample_every"])
            return {"d": p["d"], "T": p["T"], "tau_global": trep.tau_global,
                    "tau_local": trep.tau_local, "tau_qsl": trep.tau_qsl}
        tau = qsl_conveyor(p["m"], p["wavelength"], p["U0"], p["dx_spread"], p["d"])
        return {"d": p["d"], "dx_spread": p["dx_spread"],
                "tau_local": local_bound_transport(p["m"], p["wavelength"], p["U0"]),
                "tau_qsl": tau}
    # lz
    lzp = _lz_build(params)
    traj = integrate(lzp, chi0=params["chi0"], phi0=params["phi0"],
                     t_max=_lz_tmax(params), dt=params["dt"],
                     chi_target=params["chitau"])
    rep = evaluate_bounds(traj, bloch_pure_chart())
    row = {"v": params["v"], "c": params["c"], "tau_qsl": rep.tau_qsl,
           "arrival_time": traj.extras["arrival_time"], "elapsed": traj.elapsed}
    if params["chitau"] is not None:
        row["tau_formula"] = qsl_time_lz(params["v"], params["chi0"], params["chitau"])
    return row


def _run_sweep(config, params):
    specs = [_parse_sweep_spec(s) for s in config.sweep]
    names = [name for name, _ in specs]
    grids = [vals for _, vals in specs]
    points = []
    for combo in itertools.product(*grids):
        pt = dict(params)
        pt.update(dict(zip(names, combo)))
        points.append(pt)

    if config.workers and config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_sweep_point, config.scenario, pt) for pt in points]
            rows = [f.result() for f in futures]  # ordered by sweep index
    else:
        rows = [_sweep_point(config.scenario, pt) for pt in points]

    columns = list(names)
    for key in rows[0]:
        if key not in columns:
            columns.append(key)
    table = []
    for pt, row in zip(points, rows):
        merged = {**{n: pt[n] for n in names}, **row}
        table.append([merged.get(col) for col in columns])
    report = {
        "config": resolved_config(config, params),
        "scenario": config.scenario,
        "sweep_parameters": names,
        "rows": [dict(zip(columns, row)) for row in table],
    }
    svg_series = None
    labels = ("", "", "")
    if "tau_qsl" in columns and len(names) == 1:
        xcol = columns.index(names[0])
        ycol = columns.index("tau_qsl")
        xs = [row[xcol] for row in table]
        ys = [row[ycol] for row in table]
        svg_series = [("tau_qsl", np.asarray(xs, float), np.asarray(ys, float))]
        labels = (f"tau_qsl vs {names[0]}", names[0], "tau_qsl")

    os.makedirs(config.outdir, exist_ok=True)
    written = []
    if config.emit.get("csv", True):
        path = os.path.join(config.outdir, "sweep.csv")
        _write_csv(path, columns, table)
        written.append(path)
    if config.emit.get("json", True):
        path = os.path.join(config.outdir, "report.json")
        _write_json(path, report)
        written.append(path)
    if config.emit.get("svg", True) and svg_series:
        path = os.path.join(config.outdir, "plot.svg")
        title, xlabel, ylabel = labels
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_svg.line_chart(svg_series, title=title, xlabel=xlabel, ylabel=ylabel))
        written.append(path)
    return 0


def run(config: RunConfig) -> int:
    """Execute a validated config; returns the exit status (0 = ok).

    Numeric domain errors raise; the CLI wrapper maps them to exit code 3.
    """
    params = _resolved_params(config)
    if config.sweep:
        # swept transport defaults to the closed-form route: the scaling laws
        # are the point of a sweep, and simulation stays an explicit opt-in
        if config.scenario == "transport" and config.params.get("mode") is None:
            params["mode"] = "formula"
        return _run_sweep(config, params)
    if config.scenario == "lz":
        return _run_lz(config, params)
    if config.scenario == "transport":
        return _run_transport(config, params)
    if config.scenario == "jc":
        return _run_jc(config, params)
    return _run_metric(config, params)


# ---------------------------------------------------------------------- cli


def _load_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]  # accept a previously written report.json
    return data


def _build_config(scenario, config_path, outdir, emit_csv, emit_json, emit_svg,
                  sweep, workers, flag_params):
    params = {}
    sweeps = []
    file_outdir = None
    if config_path:
        data = _load_config_file(config_path)
        if "params" in data or "scenario" in data:
            params.update(data.get("params") or {})
            sw = data.get("sweep")
            if isinstance(sw, str):
                sweeps = [sw]
            elif sw:
                sweeps = list(sw)
            file_outdir = data.get("outdir")
        else:
            params.update(data)  # flat param object
    for key, val in flag_params.items():
        if val is not None:
            params[key] = val
    if sweep:
        sweeps = list(sweep)
    cfg = RunConfig(
        scenario=scenario,
        params=params,
        outdir=outdir if outdir is not None else (file_outdir or "."),
        emit={"csv": emit_csv, "json": emit_json, "svg": emit_svg},
        sweep=sweeps,
        workers=workers if workers is not None else 1,
    )
    return cfg


def _dispatch(scenario, kwargs):
    config_path = kwargs.pop("config")
    outdir = kwargs.pop("outdir")
    emit_csv = kwargs.pop("csv")
    emit_json = kwargs.pop("json")
    emit_svg = kwargs.pop("svg")
    sweep = kwargs.pop("sweep", ())
    workers = kwargs.pop("workers")
    point = kwargs.pop("point", None)
    if point is not None:
        try:
            kwargs["point"] = [float(v) for v in point.split(",")]
        except ValueError:
            click.echo(f"error: metric.point: not a comma-separated number list: {point!r}",
                       err=True)
            sys.exit(2)
    try:
        cfg = _build_config(scenario, config_path, outdir, emit_csv, emit_json,
                            emit_svg, sweep, workers, kwargs)
    except (OSError, json.JSONDecodeError) as err:
        click.echo(f"error: config: {err}", err=True)
        sys.exit(2)
    diags = validate(cfg)
    if diags:
        for d in diags:
            click.echo(f"error: {d}", err=True)
        sys.exit(2)
    try:
        status = run(cfg)
    except NUMERIC_DOMAIN_ERRORS as err:
        click.echo(f"{scenario}: numeric domain error: {err}", err=True)
        sys.exit(3)
    sys.exit(status)


def _common_options(fn):
    fn = click.option("--config", type=click.Path(), default=None,
                      help="JSON config file (flags override its values).")(fn)
    fn = click.option("--outdir", type=click.Path(), default=None,
                      help="Output directory (default: current directory).")(fn)
    fn = click.option("--csv/--no-csv", "csv", default=True, help="Emit CSV data.")(fn)
    fn = click.option("--json/--no-json", "json", default=True, help="Emit report.json.")(fn)
    fn = click.option("--svg/--no-svg", "svg", default=True, help="Emit plot.svg.")(fn)
    fn = click.option("--sweep", multiple=True, metavar="NAME=MIN:MAX:COUNT:SCALE",
                      help="Sweep a parameter (linear or log scale).")(fn)
    fn = click.option("--workers", type=int, default=None,
                      help="Parallel workers for sweeps (default 1).")(fn)
    return fn


@click.group()
def main():
    """Quantum speed limit scenarios: bounds, trajectories, sweeps."""


@main.command("lz")
@_common_options
@click.option("--v", type=float, default=None, help="Coupling strength (required).")
@click.option("--c", type=float, default=None, help="Interaction strength.")
@click.option("--chi0", type=float, default=None, help="Initial polar angle (required).")
@click.option("--chitau", type=float, default=None, help="Target polar angle.")
@click.option("--phi0", type=float, default=None, help="Initial azimuth.")
@click.option("--protocol", type=str, default=None,
              help="optimal | constant | timeseries.")
@click.option("--gamma0", type=float, default=None, help="Constant bias value.")
@click.option("--tmax", type=float, default=None, help="Integration horizon.")
@click.option("--dt", type=float, default=None, help="Sampling step.")
def lz_cmd(**kwargs):
    """Two-mode Bloch dynamics and the brachistochrone bound."""
    _dispatch("lz", kwargs)


@main.command("transport")
@_common_options
@click.option("--mode", type=str, default=None, help="simulate | formula | given-k2.")
@click.option("--d", type=float, default=None, help="Transport distance (required).")
@click.option("--u0", "U0", type=float, default=None, help="Trap depth.")
@click.option("--wavelength", type=float, default=None, help="Lattice wavelength.")
@click.option("--m", type=float, default=None, help="Particle mass.")
@click.option("--dx-spread", "dx_spread", type=float, default=None,
              help="Position spread (default: trap ground-state width).")
@click.option("--k2", type=float, default=None, help="Mean-square kinetic energy (given-k2).")
@click.option("--t-total", "T", type=float, default=None, help="Schedule duration.")
@click.option("--n-grid", "n_grid", type=int, default=None, help="Grid points (power of 2).")
@click.option("--padding", type=float, default=None, help="Domain padding in wavelengths.")
@click.option("--dt", type=float, default=None, help="Propagation step.")
@click.option("--sample-every", "sample_every", type=int, default=None,
              help="Steps between samples.")
def transport_cmd(**kwargs):
    """Conveyor-belt wavepacket transport and the √d bound."""
    _dispatch("transport", kwargs)


@main.command("jc")
@_common_options
@click.option("--gamma0", type=float, default=None, help="Coupling strength (required).")
@click.option("--lambda0", type=float, default=None, help="Spectral width (required).")
@click.option("--omega0", type=float, default=None, help="Transition frequency.")
@click.option("--tmax", type=float, default=None, help="Time horizon.")
@click.option("--n-samples", "n_samples", type=int, default=None, help="CSV sample count.")
def jc_cmd(**kwargs):
    """Damped two-level dynamics, backflow, and the open-system bound."""
    _dispatch("jc", kwargs)


@main.command("metric")
@_common_options
@click.option("--chart", type=str, default=None, help="bloch | population | z.")
@click.option("--point", type=str, default=None,
              help="Chart coordinates, comma separated (required).")
def metric_cmd(**kwargs):
    """Metric tensor at a chart point."""
    _dispatch("metric", kwargs)


@main.command("sweep")
@click.argument("scenario", type=click.Choice(["lz", "transport", "jc"]))
@_common_options
@click.option("--param", "param", multiple=True, metavar="NAME=MIN:MAX:COUNT:SCALE",
              help="Sweep axis; repeat for a grid (row-major, last varies fastest).")
@click.option("--v", type=float, default=None)
@click.option("--c", type=float, default=None)
@click.option("--chi0", type=float, default=None)
@click.option("--chitau", type=float, default=None)
@click.option("--phi0", type=float, default=None)
@click.option("--protocol", type=str, default=None)
@click.option("--gamma0", type=float, default=None)
@click.option("--tmax", type=float, default=None)
@click.option("--dt", type=float, default=None)
@click.option("--mode", type=str, default=None)
@click.option("--d", type=float, default=None)
@click.option("--u0", "U0", type=float, default=None)
@click.option("--wavelength", type=float, default=None)
@click.option("--m", type=float, default=None)
@click.option("--dx-spread", "dx_spread", type=float, default=None)
@click.option("--k2", type=float, default=None)
@click.option("--t-total", "T", type=float, default=None)
@click.option("--n-grid", "n_grid", type=int, default=None)
@click.option("--padding", type=float, default=None)
@click.option("--sample-every", "sample_every", type=int, default=None)
@click.option("--lambda0", type=float, default=None)
@click.option("--omega0", type=float, default=None)
@click.option("--n-samples", "n_samples", type=int, default=None)
def sweep_cmd(scenario, param, **kwargs):
    """Parameter sweep for a scenario; grid rows ordered by sweep index."""
    sweep = tuple(kwargs.pop("sweep", ())) + tuple(param)
    kwargs["sweep"] = sweep
    # scenario subcommands own a narrower flag set; drop the unrelated ones
    relevant = set(_SCHEMAS[scenario])
    for key in [k for k in list(kwargs)
                if k not in relevant
                and k in {"v", "c", "chi0", "chitau", "phi0", "protocol", "gamma0",
                          "tmax", "dt", "mode", "d", "U0", "wavelength", "m",
                          "dx_spread", "k2", "T", "n_grid", "padding",
                          "sample_every", "lambda0", "omega0", "n_samples"}]:
        kwargs.pop(key)
    _dispatch(scenario, kwargs)


if __name__ == "__main__":
    main()
