"""Speed-limit bounds evaluated on sampled parameter trajectories.

Two bounds are computed for a trajectory λ(t):

  global bound  L(endpoints) / max_t V(t)      with V the total metric speed,
  local bounds  |λ_i(τ) − λ_i(0)| / max_t |dλ_i/dt|   per parameter,

and the reported speed-limit time is the larger of the global bound and the
best local bound. Both are rigorous lower bounds on the elapsed time: the
geodesic length L never exceeds the path length ∫V dt ≤ V_max·τ, and the
same argument applies coordinate-wise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    ContractViolation,
    MixedStateParam,
    ParameterChart,
    PureStateParam,
    bures_angle_mixed,
    bures_angle_pure,
    global_speed,
    metric_tensor_mixed,
    metric_tensor_pure,
)


@dataclass
class Trajectory:
    """Time-sampled parameter path λ(t_k).

    t: strictly increasing sample times, shape (M+1,).
    lam: parameter samples, shape (M+1, r).
    names: one label per parameter.
    endpoint_states: optional (initial, final) state pair used for the
        endpoint geodesic; without it the chart is evaluated at λ(t_0),
        λ(t_M).
    speeds: optional analytic |dλ_i/dt| samples, shape (M+1, r), attached
        by scenario integrators that know their derivatives exactly;
        when present they bypass finite differencing.
    extras: free-form per-sample series (conserved quantities and the
        like) carried along for diagnostics.
    """

    t: np.ndarray
    lam: np.ndarray
    names: Sequence[str]
    endpoint_states: Optional[tuple] = None
    speeds: Optional[np.ndarray] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        if self.lam.ndim == 1:
            self.lam = self.lam[:, None]
        if self.t.ndim != 1 or self.lam.shape[0] != self.t.size:
            raise ContractViolation("need one parameter row per time sample")
        if self.t.size >= 2 and np.any(np.diff(self.t) <= 0):
            raise ContractViolation("time grid must be strictly increasing")
        if len(self.names) != self.lam.shape[1]:
            raise ContractViolation("need one name per parameter column")
        if self.speeds is not None:
            self.speeds = np.asarray(self.speeds, dtype=float)
            if self.speeds.shape != self.lam.shape:
                raise ContractViolation("speeds must match the parameter samples in shape")

    @property
    def n_params(self) -> int:
        return self.lam.shape[1]

    @property
    def elapsed(self) -> float:
        return float(self.t[-1] - self.t[0])

    def derivative_samples(self) -> np.ndarray:
        """dλ/dt at every node: central differences, one-sided at the ends."""
        if self.t.size < 2:
            return np.zeros_like(self.lam)
        return np.gradient(self.lam, self.t, axis=0)


@dataclass(frozen=True)
class QslReport:
    """Bound summary for one trajectory.

    tau_qsl is exactly max(global_bound, best_local_bound). Local bounds
    where the parameter moved but the sampled speed is zero are +inf
    sentinels; they are excluded from best_local_bound and flagged through
    ``has_infinite_local``.
    """

    global_geodesic: float
    global_speed_max: float
    global_bound: float
    local_geodesics: tuple
    local_speed_max: tuple
    local_bounds: tuple
    best_local_bound: float
    critical_parameter: int
    parameter_names: tuple
    tau_qsl: float
    has_infinite_local: bool = False

    def to_dict(self) -> dict:
        return {
            "global_geodesic": self.global_geodesic,
            "global_bound": self.global_bound,
            "local_bounds": list(self.local_bounds),
            "critical_parameter": (
                self.parameter_names[self.critical_parameter]
                if 0 <= self.critical_parameter < len(self.parameter_names)
                else None
            ),
            "tau_qsl": self.tau_qsl,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def local_geodesic(traj: Trajectory, i: int) -> float:
    """Endpoint displacement |λ_i(t_M) − λ_i(t_0)| (not the path length)."""
    if not 0 <= i < traj.n_params:
        raise ContractViolation(f"parameter index {i} out of range")
    return float(abs(traj.lam[-1, i] - traj.lam[0, i]))


def local_speed_max(traj: Trajectory, i: int) -> float:
    """Max |dλ_i/dt| over the grid, by differencing or attached speeds."""
    if not 0 <= i < traj.n_params:
        raise ContractViolation(f"parameter index {i} out of range")
    if traj.t.size < 2:
        return 0.0
    if traj.speeds is not None:
        return float(np.max(np.abs(traj.speeds[:, i])))
    return float(np.max(np.abs(traj.derivative_samples()[:, i])))


def _endpoint_geodesic(traj: Trajectory, chart: ParameterChart, endpoint_metric: str) -> float:
    if traj.endpoint_states is not None:
        a, b = traj.endpoint_states
    else:
        a = chart.evaluate(traj.lam[0])
        b = chart.evaluate(traj.lam[-1])
    if endpoint_metric == "pure":
        if not isinstance(a, PureStateParam):
            raise ContractViolation("pure endpoint metric on a non-pure state")
        return bures_angle_pure(a, b)
    if endpoint_metric == "mixed":
        if not isinstance(a, MixedStateParam):
            raise ContractViolation("mixed endpoint metric on a non-mixed state")
        return bures_angle_mixed(a, b)
    raise ContractViolation(f"endpoint_metric must be 'pure' or 'mixed', got {endpoint_metric!r}")


def evaluate_bounds(traj: Trajectory, chart: ParameterChart, endpoint_metric: str = "pure") -> QslReport:
    """Evaluate the global and per-parameter bounds on a trajectory.

    Division conventions: a 0/0 local bound (parameter never moved) is 0;
    displacement/0 yields the +inf sentinel which is excluded from the max
    and flagged. The global speed is the metric quadratic form at every
    node, evaluated with attached analytic speeds when available and
    sampled derivatives otherwise.
    """
    if chart.dim != traj.n_params:
        raise ContractViolation("chart dimension does not match the trajectory")
    geo = _endpoint_geodesic(traj, chart, endpoint_metric)

    deriv = traj.derivative_samples()
    if traj.speeds is not None:
        mags = traj.speeds
    else:
        mags = np.abs(deriv)

    # |dλ/dt| magnitudes are enough for the quadratic form only when g is
    # diagonal; use signed derivatives, swapping in analytic magnitudes
    # with the sampled signs when they were attached.
    vecs = deriv if traj.speeds is None else np.copysign(traj.speeds, deriv)
    if (endpoint_metric == "pure" and chart.evaluate_batch is not None
            and chart.derivative_batch is not None):
        # vectorized FS quadratic form: v·g·v at λ equals the squared
        # increment of the combined tangent (same Gram expression)
        p, _ = chart.evaluate_batch(traj.lam)
        dp, dphi = chart.derivative_batch(traj.lam)
        dp_tot = np.einsum("kr,krn->kn", vecs, dp)
        dphi_tot = np.einsum("kr,krn->kn", vecs, dphi)
        w = p * p
        vals = (np.sum(dp_tot * dp_tot, axis=1)
                + np.sum(w * dphi_tot * dphi_tot, axis=1)
                - np.sum(w * dphi_tot, axis=1) ** 2)
        vmax = math.sqrt(max(float(np.max(vals)), 0.0)) if vals.size else 0.0
    else:
        metric_fn = metric_tensor_pure if endpoint_metric == "pure" else metric_tensor_mixed
        vmax = 0.0
        for k in range(traj.t.size):
            g = metric_fn(chart, traj.lam[k])
            val = g.quadratic_form(vecs[k])
            vmax = max(vmax, math.sqrt(max(val, 0.0)))

    global_bound = 0.0 if geo == 0.0 else (math.inf if vmax == 0.0 else geo / vmax)

    locals_geo = tuple(local_geodesic(traj, i) for i in range(traj.n_params))
    locals_vmax = tuple(float(np.max(mags[:, i])) if traj.t.size > 1 else 0.0 for i in range(traj.n_params))
    local_bounds = []
    has_inf = False
    for li, vi in zip(locals_geo, locals_vmax):
        if li == 0.0:
            local_bounds.append(0.0)
        elif vi == 0.0:
            local_bounds.append(math.inf)
            has_inf = True
        else:
            local_bounds.append(li / vi)
    finite = [b for b in local_bounds if math.isfinite(b)]
    best_local = max(finite) if finite else 0.0
    critical = local_bounds.index(best_local) if finite else -1

    if math.isinf(global_bound):
        # frozen state with a nonzero endpoint geodesic cannot happen for a
        # trajectory that actually connects its endpoints; keep the sentinel
        # out of tau_qsl the same way as for local bounds
        tau = best_local
    else:
        tau = max(global_bound, best_local)
    return QslReport(
        global_geodesic=geo,
        global_speed_max=vmax,
        global_bound=global_bound if math.isfinite(global_bound) else 0.0,
        local_geodesics=locals_geo,
        local_speed_max=locals_vmax,
        local_bounds=tuple(local_bounds),
        best_local_bound=best_local,
        critical_parameter=critical,
        parameter_names=tuple(traj.names),
        tau_qsl=tau,
        has_infinite_local=has_inf,
    )


def verify_bound(traj: Trajectory, report: QslReport) -> tuple:
    """Check tau_qsl against the actually elapsed time.

    Returns (ok, margin) with ok = tau_qsl ≤ elapsed·(1 + 1e-6) and
    margin = elapsed − tau_qsl.
    """
    elapsed = traj.elapsed
    ok = report.tau_qsl <= elapsed * (1.0 + 1e-6)
    return bool(ok), float(elapsed - report.tau_qsl)
