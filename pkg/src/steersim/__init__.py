"""Steady-state Gaussian steering between the mirrors of two fiber-coupled
optomechanical cavities."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    CavityParams,
    NormalizedParams,
    PhysicalParams,
    build_diffusion,
    build_drift,
    normalize,
    solve_steady_state,
    thermal_occupation,
)
from .steering import (  # noqa: E402
    Classification,
    SteeringResult,
    classify,
    energy_imbalance,
    evaluate,
    gaussian_steering,
)
from .sweep import Axis, Constraint, figure_preset, run_sweep  # noqa: E402
