"""Exception types shared across the package."""


class IntwaveError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(IntwaveError, ValueError):
    """Invalid physical or dimensionless parameters."""


class GridError(IntwaveError, ValueError):
    """Grid does not satisfy the sampling contract (size, power of two, resolution)."""


class MeanZeroError(IntwaveError, ValueError):
    """Input to a singular operator kind is not mean-zero."""


class AmplitudeGateError(IntwaveError, ValueError):
    """Interface amplitude exceeds the range where the extension solver is trusted."""


class ConvergenceError(IntwaveError, RuntimeError):
    """An iterative solver failed to reach its tolerance.

    Carries the final residual so callers can report how close it got.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SubcriticalSpeedError(IntwaveError, ValueError):
    """Wave speed gives lambda_c < lambda0, so the slow-speed expansion parameters do not exist."""
