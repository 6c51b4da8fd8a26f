"""Discrete and continuous entropies, their exact connection, and entropic EPR-steering witnesses."""

__version__ = "0.1.0"

from .core import (
    Axis,
    BinningSpec,
    Diagnostics,
    GridDensity,
    Histogram,
    Windows,
    integrate,
    marginalize,
    normalize,
    validate,
)
from .discretize import bin_density, coarsen, window_conditional
from .entropy import (
    EntropyValue,
    conditional_entropy_differential,
    conditional_entropy_discrete,
    conditional_mutual_information_differential,
    conditional_mutual_information_discrete,
    differential_entropy,
    discrete_entropy,
    mutual_information_differential,
    mutual_information_discrete,
)
from .connection import (
    ConnectionReport,
    GapReport,
    conditional_mi_probe,
    gap_suite,
    jensen_step,
    refine_convergence,
    vector_gap,
    verify_connection,
)
from .gaussian_model import BiphotonParams, analytic_entropies, momentum_joint, position_joint
from .steering import (
    SteeringReport,
    continuous_steering_lhs,
    discrete_steering_test,
    per_axis_vs_vector,
    steering_bin_scan,
)

__all__ = [
    "analytic_entropies",
    "Axis",
    "bin_density",
    "BinningSpec",
    "BiphotonParams",
    "coarsen",
    "conditional_entropy_differential",
    "conditional_entropy_discrete",
    "conditional_mi_probe",
    "conditional_mutual_information_differential",
    "conditional_mutual_information_discrete",
    "ConnectionReport",
    "continuous_steering_lhs",
    "Diagnostics",
    "differential_entropy",
    "discrete_entropy",
    "discrete_steering_test",
    "EntropyValue",
    "gap_suite",
    "GapReport",
    "GridDensity",
    "Histogram",
    "integrate",
    "jensen_step",
    "marginalize",
    "momentum_joint",
    "mutual_information_differential",
    "mutual_information_discrete",
    "normalize",
    "per_axis_vs_vector",
    "position_joint",
    "refine_convergence",
    "steering_bin_scan",
    "SteeringReport",
    "validate",
    "vector_gap",
    "verify_connection",
    "window_conditional",
    "Windows",
]
