"""Two-layer internal capillary-gravity waves.

Dispersion and parameter-plane classification, Dirichlet-Neumann operator
calculus on periodic strips, solitary-wave profiles of the reduced models,
spectral analysis of the linearized energy, and moment-based stability
verdicts.  The command line lives in intwave.cli.
"""

__version__ = "0.1.0"

from .errors import (
    AmplitudeGateError,
    ConvergenceError,
    GridError,
    IntwaveError,
    MeanZeroError,
    ParameterError,
    SubcriticalSpeedError,
)
from .grids import GridProfile
from .params import (
    NonDimParams,
    PhysicalParams,
    SpeedScaling,
    classify_region,
    nondimensionalize,
    require_supercritical,
    speed_to_scaling,
)

__all__ = [
    "AmplitudeGateError",
    "ConvergenceError",
    "GridError",
    "GridProfile",
    "IntwaveError",
    "MeanZeroError",
    "NonDimParams",
    "ParameterError",
    "PhysicalParams",
    "SpeedScaling",
    "SubcriticalSpeedError",
    "__version__",
    "classify_region",
    "nondimensionalize",
    "require_supercritical",
    "speed_to_scaling",
]
