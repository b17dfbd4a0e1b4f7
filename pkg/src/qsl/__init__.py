"""Geometric quantum speed limits.

Evaluates lower bounds on quantum evolution times from the Riemannian
geometry of state space: the Fubini-Study metric for pure states and the
Bures metric for density matrices. Bounds come in two flavors, a global
one (Bures-angle geodesic over maximal total speed) and per-parameter
local ones (coordinate displacement over maximal coordinate speed); the
reported speed limit is the larger of the two.

Three scenario engines verify the bounds against directly integrated
dynamics: a driven two-mode condensate on the Bloch sphere, wavepacket
transport in a moving optical lattice, and a damped two-level atom with
a structured reservoir.
"""

from .geometry import (
    PureStateParam,
    MixedStateParam,
    ParameterChart,
    MetricTensor,
    ContractViolation,
    SingularEigenvalueError,
    fs_increment,
    metric_tensor_pure,
    metric_tensor_mixed,
    bures_angle_pure,
    bures_angle_mixed,
    global_speed,
    bloch_pure_chart,
    qubit_diagonal_chart,
    qubit_z_chart,
)
from .bounds import Trajectory, QslReport, local_geodesic, local_speed_max, evaluate_bounds, verify_bound
from . import landau_zener
from . import transport
from . import jaynes_cummings

__version__ = "0.1.0"

__all__ = [
    "PureStateParam",
    "MixedStateParam",
    "ParameterChart",
    "MetricTensor",
    "ContractViolation",
    "SingularEigenvalueError",
    "fs_increment",
    "metric_tensor_pure",
    "metric_tensor_mixed",
    "bures_angle_pure",
    "bures_angle_mixed",
    "global_speed",
    "bloch_pure_chart",
    "qubit_diagonal_chart",
    "qubit_z_chart",
    "Trajectory",
    "QslReport",
    "local_geodesic",
    "local_speed_max",
    "evaluate_bounds",
    "verify_bound",
    "landau_zener",
    "transport",
    "jaynes_cummings",
]
