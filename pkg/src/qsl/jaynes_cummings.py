"""Damped two-level atom in a leaky cavity (resonant, single excitation).

The reduced dynamics of the excited population is ρ₁₁(t) = e^{−λ₀t} u(t)²
with, writing D = √|λ₀² − 2γ₀λ₀|,

    u(t) = cosh(Dt/2) + (λ₀/D) sinh(Dt/2)      (weak coupling, γ₀ < λ₀/2)
    u(t) = cos(Dt/2) + (λ₀/D) sin(Dt/2)        (strong coupling, γ₀ > λ₀/2)
    u(t) = 1 + λ₀t/2                            (critical, D → 0)

and the time-dependent decay rate of the nonunitary generator

    L_t[ρ] = γ(t) (σ₋ρσ₊ − ½σ₊σ₋ρ − ½ρσ₊σ₋)

is γ(t) = −2 d/dt ln u(t) − ... equivalently the quoted closed forms

    γ(t) = 2γ₀λ₀ sinh(Dt/2) / (D cosh(Dt/2) + λ₀ sinh(Dt/2))   (weak)
    γ(t) = 2γ₀λ₀ tan(Dt/2) / (D + λ₀ tan(Dt/2))                (strong)
    γ(t) = 2γ₀λ₀ t / (2 + λ₀ t)                                 (critical).

In the strong regime γ(t) diverges at the first zero of u (the tan-form
denominator zero) at t* = 2(π − atan(D/λ₀))/D; the rate description and
every route through ∫γ dt is valid only on [0, t*). The population ρ₁₁ and
its derivative σ_t = ∂_t ρ₁₁ = −γρ₁₁ stay finite for all t (the u factors
cancel the pole), which is what the information-backflow analysis uses:
σ_t > 0 exactly where γ < 0, and the backflow measure sums the ρ₁₁ rises
over those windows.

Density matrices here use basis order (excited, ground), so ρ[0,0] = ρ₁₁,
matching the diagonal qubit chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .bounds import QslReport, Trajectory
from .geometry import ContractViolation

_CRITICAL_FRACTION = 1e-6   # |D| below this times λ0 switches to series limits


class DomainEndError(RuntimeError):
    """A rate-based route was evaluated past the first γ(t) pole."""


class ToleranceError(RuntimeError):
    """Numerical positivity/trace drift exceeded the allowed tolerance."""


@dataclass(frozen=True)
class JcParams:
    """Coupling γ0, spectral width λ0, transition frequency ω0 (all energies).

    ω0 enters only the Lorentzian spectral density; the resonant reduced
    dynamics depends on γ0 and λ0 alone.
    """

    gamma0: float
    lambda0: float
    omega0: float = 0.0

    def __post_init__(self):
        if not self.gamma0 > 0:
            raise ContractViolation(f"coupling gamma0 must be positive, got {self.gamma0}")
        if not self.lambda0 > 0:
            raise ContractViolation(f"spectral width lambda0 must be positive, got {self.lambda0}")

    @property
    def D(self) -> float:
        """√|λ0² − 2γ0λ0|."""
        return math.sqrt(abs(self.lambda0**2 - 2.0 * self.gamma0 * self.lambda0))

    @property
    def regime(self) -> str:
        if self.D < _CRITICAL_FRACTION * self.lambda0:
            return "critical"
        return "weak" if self.gamma0 < 0.5 * self.lambda0 else "strong"

    @property
    def domain_end(self) -> float:
        """End of the rate description: first γ pole (strong), else +inf."""
        if self.regime != "strong":
            return math.inf
        return 2.0 * (math.pi - math.atan(self.D / self.lambda0)) / self.D


@dataclass(frozen=True)
class QubitBlochPoint:
    """Bloch vector (0, 0, z) of a diagonal qubit state."""

    z: float

    def __post_init__(self):
        if abs(self.z) > 1.0 + 1e-12:
            raise ContractViolation(f"Bloch z component out of range: {self.z}")
        object.__setattr__(self, "z", float(min(max(self.z, -1.0), 1.0)))

    @classmethod
    def from_rho11(cls, rho11: float) -> "QubitBlochPoint":
        return cls(z=2.0 * rho11 - 1.0)

    @property
    def rho11(self) -> float:
        return 0.5 * (1.0 + self.z)


# --------------------------------------------------------------- closed forms


def _u_and_du(t, params: JcParams):
    """u(t) and u′(t) per regime, vectorized over t."""
    t = np.asarray(t, dtype=float)
    lam, D = params.lambda0, params.D
    if params.regime == "critical":
        u = 1.0 + 0.5 * lam * t
        du = np.full_like(u, 0.5 * lam)
    elif params.regime == "weak":
        ch, sh = np.cosh(0.5 * D * t), np.sinh(0.5 * D * t)
        u = ch + (lam / D) * sh
        du = 0.5 * D * sh + 0.5 * lam * ch
    else:
        c, s = np.cos(0.5 * D * t), np.sin(0.5 * D * t)
        u = c + (lam / D) * s
        du = -0.5 * D * s + 0.5 * lam * c
    return u, du


def decay_rate(t, params: JcParams):
    """Time-dependent decay rate γ(t); vectorized over t.

    Positive in the weak and critical regimes; in the strong regime it
    diverges at params.domain_end and is negative just beyond (backflow).
    Values past the pole are the model's rate between poles; rate-based
    evolution routes must nonetheless stop at domain_end.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ContractViolation("decay rate is defined for t >= 0")
    g0, lam = params.gamma0, params.lambda0
    if params.regime == "critical":
        out = 2.0 * g0 * lam * t / (2.0 + lam * t)
    elif params.regime == "weak":
        # 2γ0λ0·sinh/(D cosh + λ0 sinh) rewritten with e^{−Dt} so both
        # factors stay finite for λ0·t ≫ 1 (cosh alone would overflow)
        D = params.D
        r = lam / D
        em = np.exp(-D * t)
        out = 2.0 * g0 * lam * (1.0 - em) / (D * ((1.0 + r) + (1.0 - r) * em))
    else:
        # tan form is 2γ0λ0·sin/(D·u); diverges at the zeros of u
        D = params.D
        u, _ = _u_and_du(t, params)
        s = np.sin(0.5 * D * t)
        with np.errstate(divide="ignore"):
            out = 2.0 * g0 * lam * s / (D * u)
    return out if out.ndim else float(out)


def rho11(t, params: JcParams, method: str = "closed"):
    """Excited-state population ρ₁₁(t) = e^{−∫₀ᵗγ} = e^{−λ0t}u(t)².

    method="closed" evaluates the closed form (valid for all t ≥ 0,
    vectorized); method="quadrature" integrates γ adaptively as an
    independent route and is restricted to the rate description's domain.
    """
    if method == "closed":
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ContractViolation("population is defined for t >= 0")
        if params.regime == "weak":
            # e^{−λ0t}u² expanded into pure decaying exponentials; the
            # direct product overflows once cosh(Dt/2) exceeds float range
            lam, D = params.lambda0, params.D
            r = lam / D
            out = 0.25 * (
                (1.0 + r) ** 2 * np.exp(-(lam - D) * t)
                + 2.0 * (1.0 - r * r) * np.exp(-lam * t)
                + (1.0 - r) ** 2 * np.exp(-(lam + D) * t)
            )
        else:
            u, _ = _u_and_du(t, params)
            out = np.exp(-params.lambda0 * t) * u * u
        return out if out.ndim else float(out)
    if method != "quadrature":
        raise ContractViolation(f"unknown method {method!r}")
    ts = float(t)
    if ts < 0:
        raise ContractViolation("population is defined for t >= 0")
    if ts >= params.domain_end:
        raise DomainEndError(
            f"t={ts:.6g} is past the rate-description pole at {params.domain_end:.6g}"
        )
    val, _ = quad(lambda x: decay_rate(x, params), 0.0, ts, limit=400, epsabs=1e-12, epsrel=1e-11)
    return float(math.exp(-val))


def sigma_backflow(t, params: JcParams):
    """Information flow rate σ_t = ∂_t ρ₁₁ = −γ(t)ρ₁₁(t); vectorized.

    Evaluated in the pole-free product form −(2γ0λ0/D)e^{−λ0t}·u·(sinh|sin),
    valid for all t ≥ 0. Positive σ_t (population rising) marks backflow and
    occurs exactly where γ(t) < 0.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ContractViolation("sigma is defined for t >= 0")
    g0, lam = params.gamma0, params.lambda0
    if params.regime == "critical":
        out = -g0 * lam * t * np.exp(-lam * t) * (1.0 + 0.5 * lam * t)
    elif params.regime == "weak":
        # e^{−λ0t}·u·sinh expanded into decaying exponentials (see rho11)
        D = params.D
        r = lam / D
        out = -(0.5 * g0 * lam / D) * (
            (1.0 + r) * np.exp(-(lam - D) * t)
            - 2.0 * r * np.exp(-lam * t)
            + (r - 1.0) * np.exp(-(lam + D) * t)
        )
    else:
        D = params.D
        u, _ = _u_and_du(t, params)
        out = -(2.0 * g0 * lam / D) * np.exp(-lam * t) * u * np.sin(0.5 * D * t)
    return out if out.ndim else float(out)


# ------------------------------------------------------------ Lindblad route


def lindblad_step(rho: np.ndarray, gamma: float, dt: float) -> np.ndarray:
    """One step of the amplitude-damping generator at fixed rate γ.

    Exact solution of dρ/dt = γ(σ₋ρσ₊ − ½σ₊σ₋ρ − ½ρσ₊σ₋) over dt:
    the excited population decays by e^{−γdt}, coherences by e^{−γdt/2},
    and the lost population lands on the ground state. Basis order is
    (excited, ground).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ContractViolation("lindblad_step needs a 2x2 density matrix")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ContractViolation("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ContractViolation("density matrix trace is not 1")
    decay = math.exp(-gamma * dt)
    out = np.empty_like(rho)
    out[0, 0] = rho[0, 0] * decay
    out[1, 1] = rho[1, 1] + rho[0, 0] * (1.0 - decay)
    out[0, 1] = rho[0, 1] * math.sqrt(decay)
    out[1, 0] = np.conj(out[0, 1])
    if abs(np.trace(out).real - 1.0) > 1e-12:
        raise ToleranceError("trace drifted beyond 1e-12 in one step")
    if float(np.min(np.linalg.eigvalsh(out))) < -1e-9:
        raise ToleranceError("density matrix lost positivity beyond 1e-9")
    return out


def evolve_lindblad(params: JcParams, t_max: float, n_steps: int, rho0: Optional[np.ndarray] = None):
    """Compose lindblad_step with midpoint-sampled γ(t); third ρ₁₁ route.

    Returns (t grid, ρ₁₁ samples). Restricted to the rate description's
    domain; the step rate is γ(t+dt/2), making the composition exact up to
    the midpoint-rule error in ∫γ.
    """
    if t_max >= params.domain_end:
        raise DomainEndError(
            f"t_max={t_max:.6g} is past the rate-description pole at {params.domain_end:.6g}"
        )
    if rho0 is None:
        rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    dt = t_max / n_steps
    t = np.linspace(0.0, t_max, n_steps + 1)
    pops = np.empty(n_steps + 1)
    rho = np.asarray(rho0, dtype=complex)
    pops[0] = rho[0, 0].real
    for k in range(n_steps):
        gamma = float(decay_rate(t[k] + 0.5 * dt, params))
        rho = lindblad_step(rho, gamma, dt)
        pops[k + 1] = rho[0, 0].real
    return t, pops


# ----------------------------------------------------------------- backflow


def _backflow_windows(params: JcParams):
    """Yield (start, end) of consecutive σ>0 windows in the strong regime.

    With θ = Dt/2, σ > 0 exactly on θ ∈ (θ* + kπ, (k+1)π), k = 0, 1, ...,
    where θ* = π − atan(D/λ0) is the first zero of u.
    """
    D = params.D
    theta_star = math.pi - math.atan(D / params.lambda0)
    k = 0
    while True:
        yield 2.0 * (theta_star + k * math.pi) / D, 2.0 * (k + 1) * math.pi / D
        k += 1


def non_markovianity(params: JcParams, t_max: Optional[float] = None) -> float:
    """Backflow measure N = Σ over σ>0 windows of the ρ₁₁ rise, on [0, t_max].

    Zero in the weak and critical regimes (γ ≥ 0 throughout). In the strong
    regime each full window contributes ρ₁₁(window end) − 0 = e^{−2πkλ0/D};
    the sum is truncated at t_max when given, otherwise when contributions
    fall below 1e-18.
    """
    if params.regime != "strong":
        return 0.0
    total = 0.0
    for start, end in _backflow_windows(params):
        if t_max is not None and start >= t_max:
            break
        hi = end if t_max is None else min(end, t_max)
        rise = float(rho11(hi, params) - rho11(start, params))
        total += max(rise, 0.0)
        if t_max is None and float(rho11(end, params)) < 1e-18:
            break
    return total


def _golden_max(f, lo: float, hi: float, xtol: float) -> tuple:
    """Golden-section maximization of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


# ------------------------------------------------------------------ the QSL


@dataclass(frozen=True)
class JcQslResult:
    """Speed-limit summary for the full decay ρ₁₁: 1 → 0.

    The global branch is reported as 0: the initial state is pure, so the
    population chart's metric degenerates at t = 0 and the global-geodesic
    route yields no usable bound (convention documented in qsl_jc). The
    returned bound is the local population branch 1/max|σ_t|. Asymptotic
    closed forms are attached for comparison; tau_strong_formula is None
    outside the strong regime.
    """

    report: QslReport
    sigma_max: float
    t_sigma_max: float
    tau_weak_formula: float
    tau_strong_formula: Optional[float]
    regime: str

    @property
    def tau_qsl(self) -> float:
        return self.report.tau_qsl


def qsl_jc(params: JcParams, t_max: Optional[float] = None) -> JcQslResult:
    """QSL time for the full population transfer: τ = 𝔏/max|σ| = 1/max|σ_t|.

    max|σ_t| is located on a 10⁴-point grid over the search window and
    refined by golden-section to ~1e-10 relative. The search window defaults
    to the rate-description domain in the strong regime (the later backflow
    arches are exponentially smaller, so the first arch holds the global
    maximum) and to 60/(λ0−D) (the σ decay scale) otherwise.
    """
    if t_max is None:
        if params.regime == "strong":
            t_max = params.domain_end
        elif params.regime == "critical":
            t_max = 60.0 / params.lambda0
        else:
            t_max = 60.0 / (params.lambda0 - params.D)

    grid = np.linspace(0.0, t_max, 10_000)
    mags = np.abs(sigma_backflow(grid, params))
    k = int(np.argmax(mags))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    t_at, sigma_max = _golden_max(
        lambda t: abs(float(sigma_backflow(t, params))), lo, hi, xtol=1e-10 * max(t_max, 1.0)
    )
    tau_local = 1.0 / sigma_max

    report = QslReport(
        global_geodesic=0.5 * math.pi,
        global_speed_max=math.inf,
        global_bound=0.0,
        local_geodesics=(1.0,),
        local_speed_max=(sigma_max,),
        local_bounds=(tau_local,),
        best_local_bound=tau_local,
        critical_parameter=0,
        parameter_names=("rho11",),
        tau_qsl=tau_local,
    )
    lam = params.lambda0
    strong_rad = 2.0 * params.gamma0 * lam - lam * lam
    return JcQslResult(
        report=report,
        sigma_max=sigma_max,
        t_sigma_max=t_at,
        tau_weak_formula=1.0 / params.gamma0,
        tau_strong_formula=2.0 / math.sqrt(strong_rad) if strong_rad > 0 else None,
        regime=params.regime,
    )


def lorentzian_spectral_density(omega, params: JcParams):
    """Reservoir spectral density J(ω) = γ0λ0 / (2π[(ω−ω0)² + λ0²])."""
    omega = np.asarray(omega, dtype=float)
    out = params.gamma0 * params.lambda0 / (
        2.0 * math.pi * ((omega - params.omega0) ** 2 + params.lambda0**2)
    )
    return out if out.ndim else float(out)


def trajectory(params: JcParams, t_max: float, n_samples: int = 400, t_start: float = 0.0) -> Trajectory:
    """Sampled population trajectory λ = (ρ₁₁,) with analytic |σ| speeds.

    extras carry γ, σ and the Bloch z component for reporting. Note the
    diagonal chart's metric is singular at ρ₁₁ = 1, so bound evaluation
    should start at t_start > 0 when the state is initially pure.
    """
    if not t_max > t_start >= 0.0:
        raise ContractViolation("need 0 <= t_start < t_max")
    t = np.linspace(t_start, t_max, n_samples)
    pops = rho11(t, params)
    sig = sigma_backflow(t, params)
    return Trajectory(
        t=t,
        lam=pops[:, None],
        names=("rho11",),
        speeds=np.abs(sig)[:, None],
        extras={"gamma": decay_rate(t, params), "sigma": sig, "z": 2.0 * pops - 1.0},
    )


def sweep_qsl(gamma0_values, lambda0_values, t_max: Optional[float] = None) -> list:
    """τ_QSL table over a (γ0, λ0) grid; one dict per point, JSON-ready.

    Keys: gamma0, lambda0, tau_qsl, tau_weak_formula, tau_strong_formula, N.
    """
    rows = []
    for lam in lambda0_values:
        for g0 in gamma0_values:
            p = JcParams(gamma0=float(g0), lambda0=float(lam))
            r = qsl_jc(p, t_max=t_max)
            rows.append(
                {
                    "gamma0": float(g0),
                    "lambda0": float(lam),
                    "tau_qsl": r.tau_qsl,
                    "tau_weak_formula": r.tau_weak_formula,
                    "tau_strong_formula": r.tau_strong_formula,
                    "N": non_markovianity(p, t_max=t_max),
                }
            )
    return rows
