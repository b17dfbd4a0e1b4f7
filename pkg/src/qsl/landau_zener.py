"""Two-mode nonlinear Landau-Zener dynamics on the Bloch sphere.

The mean-field two-mode model with coupling v, interaction c and bias Γ(t)
reduces to angle equations

    dχ/dt = −v sinφ
    dφ/dt = Γ − cosχ (c + v cosφ / sinχ)

for the polar angle χ and azimuth φ. Along any solution the combination

    sinχ·(c + f) + 2v cosφ,   f(η) = (2F(η) + C₀)/sin²χ,   η = cosχ,

is conserved (identically zero) once C₀ = −2v sinχ₀cosφ₀ − c(1−η₀²) is
fixed from the initial data, with F(η) = ∫_{η₀}^{η} Γ dη′ accumulated along
the path. Eliminating φ through that relation turns the transit time into
the quadrature

    τ = ∫ dη / ( v·√(1 − η² − B(η)²/(4v²)) ),
    B(η) = c(1−η²) + 2F(η) + C₀.

The time-optimal (brachistochrone) protocol pins φ ≡ ±π/2 with instantaneous
phase kicks at the ends and the feedback bias Γ = c·cosχ, which makes B ≡ 0
and the transit time |χτ − χ0| / v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.integrate import quad, solve_ivp

from .bounds import Trajectory
from .geometry import ContractViolation

_CHI_CLAMP = 1e-9           # χ is kept inside [ε, π−ε]
_POLE_COSPHI = 1e-9         # |cosφ| above this at a pole is a genuine singularity
_RTOL, _ATOL = 1e-10, 1e-12


class PoleError(RuntimeError):
    """Evolution hit sinχ = 0 while the azimuth drift term was active."""


class InfeasibleQuadratureError(RuntimeError):
    """Transit-time integrand turned imaginary: the region is forbidden."""


class IntegrationError(RuntimeError):
    pass


# ------------------------------------------------------------ bias protocols


@dataclass(frozen=True)
class Constant:
    """Fixed bias Γ(t) = Γ₀."""

    gamma0: float

    def rate(self, t: float, chi: float) -> float:
        return self.gamma0

    def bias_integral(self, eta0: float, eta: float) -> float:
        # F(η) = Γ₀ (η − η₀)
        return self.gamma0 * (eta - eta0)


@dataclass(frozen=True)
class OptimalFeedback:
    """State feedback Γ = gain·cosχ; gain = c cancels the azimuth drift at φ=±π/2."""

    gain: float

    def rate(self, t: float, chi: float) -> float:
        return self.gain * math.cos(chi)

    def bias_integral(self, eta0: float, eta: float) -> float:
        # Γ = gain·η integrates to gain·(η² − η₀²)/2
        return 0.5 * self.gain * (eta * eta - eta0 * eta0)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled bias Γ(t_k), linearly interpolated, held at the end values outside."""

    t: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float))
        if self.t.ndim != 1 or self.t.shape != self.gamma.shape:
            raise ContractViolation("time series needs matching 1-d t and Γ samples")
        if self.t.size >= 2 and np.any(np.diff(self.t) <= 0):
            raise ContractViolation("time series grid must be strictly increasing")

    def rate(self, t: float, chi: float) -> float:
        return float(np.interp(t, self.t, self.gamma))

    def bias_integral(self, eta0: float, eta: float) -> float:
        raise InfeasibleQuadratureError(
            "a sampled Γ(t) protocol has no closed form in η; "
            "use the integrated trajectory's accumulated bias integral instead"
        )


Protocol = Union[Constant, OptimalFeedback, TimeSeries]


@dataclass(frozen=True)
class LzParams:
    """Model parameters: coupling v, interaction c, bias protocol, phase kicks.

    kick_start / kick_end are target azimuth values applied as instantaneous
    jumps before the first and after the last integration step; None disables
    the respective kick.
    """

    v: float
    c: float
    protocol: Protocol = field(default_factory=lambda: Constant(0.0))
    kick_start: Optional[float] = None
    kick_end: Optional[float] = None

    def __post_init__(self):
        if not self.v > 0:
            raise ContractViolation(f"coupling v must be positive, got {self.v}")


@dataclass(frozen=True)
class BlochState:
    """Point on the Bloch sphere at time t; φ is stored wrapped to (−π, π]."""

    chi: float
    phi: float
    t: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.chi <= math.pi:
            raise ContractViolation(f"polar angle must lie in [0, π], got {self.chi}")
        w = math.remainder(self.phi, 2.0 * math.pi)  # (−π, π] up to the −π edge
        if w <= -math.pi:
            w = math.pi
        object.__setattr__(self, "phi", w)

    @property
    def eta(self) -> float:
        return math.cos(self.chi)


# -------------------------------------------------------------- dynamics


def bloch_rhs(state: BlochState, params: LzParams) -> tuple:
    """(dχ/dt, dφ/dt) at the given state.

    Raises PoleError when sinχ vanishes while cosφ does not: there the
    azimuth drift v·cosφ/sinχ is a genuine singularity. The brachistochrone
    only ever touches the poles with cosφ = 0, where the limit is finite.
    """
    sin_chi = math.sin(state.chi)
    cos_phi = math.cos(state.phi)
    gamma = params.protocol.rate(state.t, state.chi)
    if abs(sin_chi) < 1e-12:
        if abs(cos_phi) > _POLE_COSPHI:
            raise PoleError(
                f"singular azimuth drift at χ={state.chi:.3e} with cosφ={cos_phi:.3e}"
            )
        drift = 0.0
    else:
        drift = params.v * cos_phi / sin_chi
    dchi = -params.v * math.sin(state.phi)
    dphi = gamma - math.cos(state.chi) * (params.c + drift)
    return dchi, dphi


def _c0(params: LzParams, chi0: float, phi0: float) -> float:
    eta0 = math.cos(chi0)
    return -2.0 * params.v * math.sin(chi0) * math.cos(phi0) - params.c * (1.0 - eta0 * eta0)


def integrate(
    params: LzParams,
    chi0: float,
    phi0: float,
    t_max: float,
    dt: float,
    chi_target: Optional[float] = None,
) -> Trajectory:
    """Integrate the angle equations and return the sampled trajectory.

    The azimuth column is kept unwrapped (continuous) so finite differencing
    stays meaningful; analytic |dχ/dt|, |dφ/dt| magnitudes are attached as
    speeds. Kicks are instantaneous jumps outside the smooth samples: the
    first sample already carries the post-kick azimuth, and the end kick is
    recorded only in extras (the global speed is formally infinite during a
    kick, so kick instants are excluded from speed sampling).

    With chi_target set, integration terminates at the first crossing and
    extras["arrival_time"] records the event time.
    """
    if dt <= 0:
        raise ContractViolation(f"sampling step dt must be positive, got {dt}")
    phi_init = params.kick_start if params.kick_start is not None else phi0

    def rhs(t, y):
        chi = min(max(y[0], _CHI_CLAMP), math.pi - _CHI_CLAMP)
        state = BlochState(chi=chi, phi=y[1], t=t)
        if chi != y[0] and abs(math.cos(state.phi)) > _POLE_COSPHI:
            raise PoleError(f"trajectory ran into the pole at t={t:.6g} with cosφ ≠ 0")
        dchi, dphi = bloch_rhs(state, params)
        # accumulated bias integral F = ∫Γ dη with dη/dt = v sinχ sinφ
        dF = params.protocol.rate(t, chi) * params.v * math.sin(chi) * math.sin(state.phi)
        return [dchi, dphi, dF]

    events = None
    if chi_target is not None:
        def hit_target(t, y):
            return y[0] - chi_target
        hit_target.terminal = True
        events = [hit_target]

    t_eval = np.arange(0.0, t_max + 0.5 * dt, dt)
    # arange accumulates rounding; the last sample may land just past t_max,
    # which solve_ivp rejects
    if t_eval[-1] > t_max:
        t_eval[-1] = t_max
    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        [chi0, phi_init, 0.0],
        method="DOP853",
        t_eval=t_eval,
        rtol=_RTOL,
        atol=_ATOL,
        events=events,
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(sol.message)

    t = sol.t
    ys = sol.y
    arrival = None
    if chi_target is not None and sol.t_events[0].size:
        arrival = float(sol.t_events[0][0])
        y_arr = sol.sol(arrival)
        if t.size == 0 or arrival > t[-1] + 1e-15:
            t = np.append(t, arrival)
            ys = np.column_stack([ys, y_arr])
        else:
            ys[:, -1] = y_arr  # event time coincides with the last kept sample

    chi, phi, F = ys[0], ys[1], ys[2]
    speeds = np.empty((t.size, 2))
    gammas = np.empty(t.size)
    for k in range(t.size):
        ck = min(max(chi[k], _CHI_CLAMP), math.pi - _CHI_CLAMP)
        st = BlochState(chi=ck, phi=phi[k], t=float(t[k]))
        dchi, dphi = bloch_rhs(st, params)
        speeds[k] = abs(dchi), abs(dphi)
        gammas[k] = params.protocol.rate(float(t[k]), ck)

    sin_chi = np.sin(chi)
    v_global = 0.5 * np.sqrt(speeds[:, 0] ** 2 + (sin_chi * speeds[:, 1]) ** 2)
    extras = {
        "eta": np.cos(chi),
        "F": F,
        "gamma": gammas,
        "V_global": v_global,
        "kick_start": params.kick_start,
        "kick_end": params.kick_end,
        "arrival_time": arrival,
    }
    return Trajectory(
        t=t,
        lam=np.column_stack([chi, phi]),
        names=("chi", "phi"),
        speeds=speeds,
        extras=extras,
    )


def conserved_residual(
    traj: Trajectory,
    params: LzParams,
    chi0: Optional[float] = None,
    phi0: Optional[float] = None,
) -> float:
    """Max |sinχ·(c+f) + 2v cosφ| along the trajectory.

    f(η) = (2F(η)+C₀)/sin²χ with C₀ fixed by the initial data; defaults take
    the initial point from the trajectory itself (the post-kick values, which
    is where the conserved relation starts to hold).
    """
    chi = traj.lam[:, 0]
    phi = traj.lam[:, 1]
    if chi0 is None:
        chi0 = float(chi[0])
    if phi0 is None:
        phi0 = float(phi[0])
    c0 = _c0(params, chi0, phi0)
    if "F" in traj.extras:
        F = np.asarray(traj.extras["F"], dtype=float)
    else:
        eta0 = math.cos(chi0)
        F = np.array([params.protocol.bias_integral(eta0, e) for e in np.cos(chi)])
    sin_chi = np.sin(chi)
    f = (2.0 * F + c0) / sin_chi**2
    residual = sin_chi * (params.c + f) + 2.0 * params.v * np.cos(phi)
    return float(np.max(np.abs(residual)))


def transit_time_quadrature(params: LzParams, eta0: float, eta_tau: float, c0: float) -> float:
    """Transit time by quadrature in η = cosχ.

    τ = ∫ dη / (v·√(1 − η² − B(η)²/(4v²))), B(η) = c(1−η²) + 2F(η) + C₀,
    taken with the orientation that makes τ positive. Requires a protocol
    whose bias integral is a function of η alone (Constant or feedback);
    raises InfeasibleQuadratureError if the radicand goes negative strictly
    inside the integration interval (forbidden region) or for sampled Γ(t).
    """
    v, c = params.v, params.c

    def radicand(eta):
        B = c * (1.0 - eta * eta) + 2.0 * params.protocol.bias_integral(eta0, eta) + c0
        return 1.0 - eta * eta - B * B / (4.0 * v * v)

    lo, hi = (eta0, eta_tau) if eta0 <= eta_tau else (eta_tau, eta0)
    if hi - lo < 1e-15:
        return 0.0
    probe = lo + (hi - lo) * (0.5 - 0.5 * np.cos(np.linspace(0.0, np.pi, 201)))
    vals = np.array([radicand(e) for e in probe[1:-1]])
    if np.any(vals <= 0.0):
        bad = probe[1:-1][vals <= 0.0][0]
        raise InfeasibleQuadratureError(
            f"transit integrand imaginary at η={bad:.6g}: forbidden region between the endpoints"
        )

    def integrand(eta):
        r = radicand(eta)
        return 1.0 / (v * math.sqrt(r)) if r > 0.0 else 0.0

    val, abserr = quad(integrand, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-11)
    return float(val)


def optimal_protocol(
    params: LzParams,
    chi0: float,
    chi_tau: float,
    phi0: float,
    phi_end: Optional[float] = None,
) -> LzParams:
    """Time-optimal protocol: phase kicks plus the feedback bias Γ = c·cosχ.

    The start kick rotates φ0 to −sgn(χτ−χ0)·π/2, which pins |dχ/dt| = v;
    the feedback bias freezes the azimuth there; the end kick rotates φ to
    phi_end (default: back to φ0). Both kicks are idealized instantaneous
    jumps.
    """
    if chi0 == chi_tau:
        raise ContractViolation("optimal protocol needs distinct initial and target polar angles")
    sign = 1.0 if chi_tau > chi0 else -1.0
    return LzParams(
        v=params.v,
        c=params.c,
        protocol=OptimalFeedback(gain=params.c),
        kick_start=-sign * 0.5 * math.pi,
        kick_end=phi0 if phi_end is None else phi_end,
    )


def qsl_time_lz(v: float, chi0: float, chi_tau: float) -> float:
    """Brachistochrone speed-limit time |χτ − χ0| / v (interaction-independent)."""
    if not v > 0:
        raise ContractViolation(f"coupling v must be positive, got {v}")
    return abs(chi_tau - chi0) / v
