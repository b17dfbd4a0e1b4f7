"""Fubini-Study and Bures geometry on parameterized quantum states.

States are handled in coordinate form. A pure state is a list of
non-negative amplitudes p_j and phases φ_j with |ψ⟩ = Σ_j p_j e^{iφ_j}|j⟩,
so the squared line element along a variation (dp, dφ) is

    dL² = Σ_j dp_j² + [Σ_j p_j² dφ_j² − (Σ_j p_j² dφ_j)²].

A mixed state is an eigen-decomposition ρ = Σ_j p̃_j |j⟩⟨j|, and the
corresponding (Bures-angle) metric under a parameter chart λ ↦ ρ(λ) is

    g_μν = ¼ Σ_j (∂_μ p̃_j)(∂_ν p̃_j)/p̃_j
           + Σ_{j<k} (p̃_j−p̃_k)²/(p̃_j+p̃_k) · Re[⟨j|∂_μ k⟩ ⟨j|∂_ν k⟩*],

which is the j<k form of the eigenbasis expansion written with
⟨k|∂_ν j⟩ = −⟨j|∂_ν k⟩* (the two differ only by that orthogonality
identity, so the quoted expression is manifestly PSD).

Everything here is a pure function of immutable inputs; ħ = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

_NORM_TOL = 1e-12
_GRAM_TOL = 1e-10
_EIG_FLOOR = -1e-10


class ContractViolation(ValueError):
    """An input broke a documented precondition (normalization, shape, ...)."""


class SingularEigenvalueError(ValueError):
    """A zero eigenvalue carries a nonzero derivative, so 1/p̃ diverges.

    The offending eigenvalue index is available as ``.index``. This is the
    boundary of state space where the mixed-state global bound degenerates;
    the error is raised rather than hidden so callers can apply their own
    convention.
    """

    def __init__(self, index: int):
        super().__init__(f"eigenvalue {index} is zero but its derivative is not")
        self.index = index


@dataclass(frozen=True)
class PureStateParam:
    """Amplitude/phase coordinates of a pure state.

    p: non-negative amplitudes, Σ p_j² = 1.
    phi: phases in radians, same length as p.
    """

    p: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "phi", phi)
        if p.shape != phi.shape or p.ndim != 1:
            raise ContractViolation("p and phi must be 1-d arrays of equal length")
        if np.any(p < 0):
            raise ContractViolation("amplitudes must be non-negative")
        norm = float(np.sum(p * p))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ContractViolation(f"sum of squared amplitudes is {norm}, not 1")

    @property
    def dim(self) -> int:
        return self.p.size

    def vector(self) -> np.ndarray:
        """The complex state vector Σ p_j e^{iφ_j}|j⟩."""
        return self.p * np.exp(1j * self.phi)


@dataclass(frozen=True)
class MixedStateParam:
    """Eigen-decomposition coordinates of a density matrix.

    eigvals: probabilities p̃_j ≥ 0 summing to 1.
    eigvecs: complex matrix whose column j is the eigenvector |j⟩;
        columns must be orthonormal (Gram matrix = identity to 1e-10).
    """

    eigvals: np.ndarray
    eigvecs: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.eigvals, dtype=float)
        v = np.asarray(self.eigvecs, dtype=complex)
        object.__setattr__(self, "eigvals", w)
        object.__setattr__(self, "eigvecs", v)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or w.size != v.shape[1]:
            raise ContractViolation("eigvecs must be square with one column per eigenvalue")
        if np.any(w < -1e-12):
            raise ContractViolation("eigenvalues must be non-negative")
        if abs(float(np.sum(w)) - 1.0) > _NORM_TOL:
            raise ContractViolation(f"eigenvalues sum to {np.sum(w)}, not 1")
        gram = v.conj().T @ v
        if np.max(np.abs(gram - np.eye(w.size))) > _GRAM_TOL:
            raise ContractViolation("eigenvector columns are not orthonormal")

    @property
    def dim(self) -> int:
        return self.eigvals.size

    def density_matrix(self) -> np.ndarray:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.conj().T


State = Union[PureStateParam, MixedStateParam]


@dataclass
class ParameterChart:
    """A smooth map from r parameters λ to state coordinates.

    evaluate(λ) must return a PureStateParam or a MixedStateParam.
    If an analytic ``derivative`` callback is given it must return, for pure
    charts, a pair of (r, N) arrays (∂_μ p_i, ∂_μ φ_i), and for mixed charts
    a pair (∂_μ p̃_j of shape (r, N), ∂_μ|j⟩ of shape (r, N, N)) where the
    eigenvector derivative is stored as columns like the eigenvectors
    themselves. Without a callback, central finite differences with step
    ``fd_step`` are used; the map must then be evaluable (and smooth, with a
    consistent eigenvector gauge) in an fd_step-neighborhood of λ.

    Pure charts may additionally provide vectorized-over-points callbacks:
    ``evaluate_batch`` mapping an (M, r) parameter block to (M, N) amplitude
    and phase arrays and ``derivative_batch`` mapping it to (M, r, N)
    tangents. They are a performance fast path for speed sampling along long
    trajectories and must agree with the pointwise callbacks exactly.
    """

    dim: int
    evaluate: Callable[[np.ndarray], State]
    derivative: Optional[Callable[[np.ndarray], tuple]] = None
    fd_step: float = 1e-6
    names: Optional[Sequence[str]] = None
    evaluate_batch: Optional[Callable[[np.ndarray], tuple]] = None
    derivative_batch: Optional[Callable[[np.ndarray], tuple]] = None

    def __post_init__(self):
        if not 1 <= self.dim:
            raise ContractViolation("chart dimension must be at least 1")

    def tangent(self, lam: np.ndarray) -> tuple:
        """Derivatives of the state coordinates with respect to each λ_μ."""
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.dim,):
            raise ContractViolation(f"expected {self.dim} parameters, got shape {lam.shape}")
        if self.derivative is not None:
            return self.derivative(lam)
        return self._fd_tangent(lam)

    def _fd_tangent(self, lam: np.ndarray) -> tuple:
        h = self.fd_step
        probe = self.evaluate(lam)
        if isinstance(probe, PureStateParam):
            dp = np.zeros((self.dim, probe.dim))
            dphi = np.zeros((self.dim, probe.dim))
            for mu in range(self.dim):
                e = np.zeros(self.dim)
                e[mu] = h
                plus = self.evaluate(lam + e)
                minus = self.evaluate(lam - e)
                dp[mu] = (plus.p - minus.p) / (2 * h)
                dphi[mu] = (plus.phi - minus.phi) / (2 * h)
            return dp, dphi
        dpt = np.zeros((self.dim, probe.dim))
        dvec = np.zeros((self.dim, probe.dim, probe.dim), dtype=complex)
        for mu in range(self.dim):
            e = np.zeros(self.dim)
            e[mu] = h
            plus = self.evaluate(lam + e)
            minus = self.evaluate(lam - e)
            dpt[mu] = (plus.eigvals - minus.eigvals) / (2 * h)
            dvec[mu] = (plus.eigvecs - minus.eigvecs) / (2 * h)
        return dpt, dvec

    def check_derivative_consistency(self, lam: np.ndarray, rtol: float = 1e-6) -> float:
        """Max relative disagreement between the analytic and FD tangent.

        Returns the worst relative deviation; raises ContractViolation when
        it exceeds rtol. Only meaningful when an analytic callback exists.
        """
        if self.derivative is None:
            return 0.0
        ana = self.derivative(np.asarray(lam, dtype=float))
        num = self._fd_tangent(np.asarray(lam, dtype=float))
        worst = 0.0
        for a, n in zip(ana, num):
            scale = max(float(np.max(np.abs(a))), 1.0)
            worst = max(worst, float(np.max(np.abs(np.asarray(a) - np.asarray(n)))) / scale)
        if worst > rtol:
            raise ContractViolation(f"analytic and finite-difference tangents differ by {worst}")
        return worst


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric PSD matrix g_μν at a chart point."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "g", g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ContractViolation("metric must be a square matrix")
        if np.max(np.abs(g - g.T)) > 1e-12:
            raise ContractViolation("metric is not symmetric")
        if g.size and float(np.min(np.linalg.eigvalsh(g))) < _EIG_FLOOR:
            raise ContractViolation("metric has an eigenvalue below -1e-10")

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def quadratic_form(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=float)
        return float(v @ self.g @ v)


def fs_increment(state: PureStateParam, dp: np.ndarray, dphi: np.ndarray) -> float:
    """Squared Fubini-Study line element dL² for increments (dp, dφ).

    dL² = Σ dp_j² + [Σ p_j² dφ_j² − (Σ p_j² dφ_j)²]. The bracketed part
    vanishes identically for a uniform phase shift (global phase), and the
    whole expression is non-negative up to roundoff.
    """
    dp = np.asarray(dp, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    if dp.shape != state.p.shape or dphi.shape != state.p.shape:
        raise ContractViolation("increment shape does not match the state")
    w = state.p * state.p
    val = float(np.sum(dp * dp) + np.sum(w * dphi * dphi) - np.sum(w * dphi) ** 2)
    if val < -1e-14:
        raise ContractViolation(f"negative squared increment {val}")
    return val


def _metric_from_pure_tangent(state: PureStateParam, dp: np.ndarray, dphi: np.ndarray) -> np.ndarray:
    w = state.p * state.p
    amp = dp @ dp.T
    phase = (dphi * w) @ dphi.T
    mean = dphi @ w
    g = amp + phase - np.outer(mean, mean)
    return 0.5 * (g + g.T)


def metric_tensor_pure(chart: ParameterChart, lam: np.ndarray) -> MetricTensor:
    """Metric tensor of a pure-state chart at λ.

    g_μν = Σ_i ∂_μp_i ∂_νp_i + Σ_i p_i² ∂_μφ_i ∂_νφ_i
           − (Σ_i p_i² ∂_μφ_i)(Σ_j p_j² ∂_νφ_j).
    """
    lam = np.asarray(lam, dtype=float)
    state = chart.evaluate(lam)
    if not isinstance(state, PureStateParam):
        raise ContractViolation("metric_tensor_pure needs a chart mapping to PureStateParam")
    if chart.dim > 2 * state.dim:
        raise ContractViolation("chart has more parameters than state coordinates")
    dp, dphi = chart.tangent(lam)
    return MetricTensor(_metric_from_pure_tangent(state, np.asarray(dp), np.asarray(dphi)))


def metric_tensor_mixed(chart: ParameterChart, lam: np.ndarray) -> MetricTensor:
    """Bures-angle metric tensor of a mixed-state chart at λ.

    Uses the eigen-decomposition form quoted in the module docstring.
    Terms with p̃_j + p̃_k = 0 are skipped. A diagonal term with p̃_j below
    1e-12 is dropped when |∂p̃_j| is also below 1e-12 and otherwise raises
    SingularEigenvalueError, because 1/p̃_j genuinely diverges there.
    """
    lam = np.asarray(lam, dtype=float)
    state = chart.evaluate(lam)
    if not isinstance(state, MixedStateParam):
        raise ContractViolation("metric_tensor_mixed needs a chart mapping to MixedStateParam")
    if chart.dim > 2 * state.dim:
        raise ContractViolation("chart has more parameters than state coordinates")
    dpt, dvec = chart.tangent(lam)
    dpt = np.asarray(dpt, dtype=float)
    dvec = np.asarray(dvec, dtype=complex)
    r, n = chart.dim, state.dim
    w = state.eigvals
    g = np.zeros((r, r))

    # classical part: ¼ Σ_j ∂p̃_j∂p̃_j / p̃_j
    for j in range(n):
        if w[j] < _NORM_TOL:
            if np.max(np.abs(dpt[:, j])) < _NORM_TOL:
                continue
            raise SingularEigenvalueError(j)
        g += 0.25 * np.outer(dpt[:, j], dpt[:, j]) / w[j]

    # quantum part: j<k eigenvector rotations weighted by (p̃_j−p̃_k)²/(p̃_j+p̃_k)
    # overlaps[mu, j, k] = ⟨j|∂_mu k⟩
    overlaps = np.einsum("ij,mjk->mik", state.eigvecs.conj().T, dvec)
    for j in range(n):
        for k in range(j + 1, n):
            denom = w[j] + w[k]
            if denom <= 0.0:
                continue
            weight = (w[j] - w[k]) ** 2 / denom
            if weight == 0.0:
                continue
            a = overlaps[:, j, k]
            g += weight * np.real(np.outer(a, a.conj()))
    return MetricTensor(0.5 * (g + g.T))


def bures_angle_pure(a: PureStateParam, b: PureStateParam) -> float:
    """Bures angle arccos|⟨a|b⟩| between two pure states, in [0, π/2]."""
    if a.dim != b.dim:
        raise ContractViolation("states live in different dimensions")
    overlap = np.vdot(a.vector(), b.vector())
    return float(np.arccos(np.clip(np.abs(overlap), 0.0, 1.0)))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def bures_angle_mixed(rho0: MixedStateParam, rhotau: MixedStateParam) -> float:
    """Bures angle arccos Tr√(√ρ₀ ρ_τ √ρ₀) between density matrices.

    For commuting diagonal states this reduces to arccos Σ_j √(p̃_j q̃_j).
    """
    if rho0.dim != rhotau.dim:
        raise ContractViolation("states live in different dimensions")
    r0 = rho0.density_matrix()
    rt = rhotau.density_matrix()
    if np.max(np.abs(r0 - r0.conj().T)) > 1e-10 or np.max(np.abs(rt - rt.conj().T)) > 1e-10:
        raise ContractViolation("reconstructed density matrix is not Hermitian")
    s = _psd_sqrt(r0)
    inner = _psd_sqrt(s @ rt @ s)
    fidelity_root = float(np.real(np.trace(inner)))
    return float(np.arccos(np.clip(fidelity_root, 0.0, 1.0)))


def global_speed(chart: ParameterChart, lam: np.ndarray, dlamdt: np.ndarray) -> float:
    """Total speed √(Σ g_μν dλ_μ/dt dλ_ν/dt) of the state along dλ/dt."""
    lam = np.asarray(lam, dtype=float)
    dlamdt = np.asarray(dlamdt, dtype=float)
    state = chart.evaluate(lam)
    if isinstance(state, PureStateParam):
        metric = metric_tensor_pure(chart, lam)
    else:
        metric = metric_tensor_mixed(chart, lam)
    val = metric.quadratic_form(dlamdt)
    return float(np.sqrt(max(val, 0.0)))


# ---------------------------------------------------------------------------
# ready-made charts
# ---------------------------------------------------------------------------

def bloch_pure_chart() -> ParameterChart:
    """Two-level pure chart λ = (χ, φ).

    p = (cos χ/2, sin χ/2), phases (−φ/2, +φ/2). Its metric is
    diag(1/4, sin²χ/4): the Bures-angle normalization, i.e. a quarter of
    the great-circle metric of the unit sphere. Bound ratios L/V are
    insensitive to that overall factor.
    """

    def ev(lam):
        chi, phi = lam
        return PureStateParam(
            p=np.array([np.cos(chi / 2), np.sin(chi / 2)]),
            phi=np.array([-phi / 2, phi / 2]),
        )

    def deriv(lam):
        chi, _ = lam
        dp = np.array([[-np.sin(chi / 2) / 2, np.cos(chi / 2) / 2], [0.0, 0.0]])
        dphi = np.array([[0.0, 0.0], [-0.5, 0.5]])
        return dp, dphi

    def ev_batch(lams):
        chi, phi = lams[:, 0], lams[:, 1]
        p = np.column_stack([np.cos(chi / 2), np.sin(chi / 2)])
        ph = np.column_stack([-phi / 2, phi / 2])
        return p, ph

    def deriv_batch(lams):
        chi = lams[:, 0]
        m = lams.shape[0]
        dp = np.zeros((m, 2, 2))
        dp[:, 0, 0] = -np.sin(chi / 2) / 2
        dp[:, 0, 1] = np.cos(chi / 2) / 2
        dphi = np.zeros((m, 2, 2))
        dphi[:, 1, 0] = -0.5
        dphi[:, 1, 1] = 0.5
        return dp, dphi

    return ParameterChart(dim=2, evaluate=ev, derivative=deriv, names=("chi", "phi"),
                          evaluate_batch=ev_batch, derivative_batch=deriv_batch)


def qubit_diagonal_chart() -> ParameterChart:
    """One-parameter mixed chart λ = (ρ₁₁,) with fixed eigenvectors.

    ρ = diag(ρ₁₁, 1−ρ₁₁) in the (excited, ground) basis; the metric is the
    scalar ¼(1/ρ₁₁ + 1/(1−ρ₁₁)).
    """

    def ev(lam):
        r11 = float(lam[0])
        return MixedStateParam(eigvals=np.array([r11, 1.0 - r11]), eigvecs=np.eye(2, dtype=complex))

    def deriv(lam):
        dpt = np.array([[1.0, -1.0]])
        dvec = np.zeros((1, 2, 2), dtype=complex)
        return dpt, dvec

    return ParameterChart(dim=1, evaluate=ev, derivative=deriv, names=("rho11",))


def qubit_z_chart() -> ParameterChart:
    """One-parameter mixed chart λ = (z,) with z = 2ρ₁₁ − 1."""

    def ev(lam):
        z = float(lam[0])
        return MixedStateParam(
            eigvals=np.array([(1.0 + z) / 2, (1.0 - z) / 2]),
            eigvecs=np.eye(2, dtype=complex),
        )

    def deriv(lam):
        dpt = np.array([[0.5, -0.5]])
        dvec = np.zeros((1, 2, 2), dtype=complex)
        return dpt, dvec

    return ParameterChart(dim=1, evaluate=ev, derivative=deriv, names=("z",))
