"""Exception types shared across the package."""


class IrsError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(IrsError, ValueError):
    """Raised when a configuration document or parameter set is invalid."""


class PlacementError(IrsError, RuntimeError):
    """Raised when surface placement cannot satisfy the request."""


class SolverError(IrsError, RuntimeError):
    """Raised when an iterative solver fails to converge.

    Carries the last iterate and residual information so callers can
    inspect or report partial progress.
    """

    def __init__(self, message, last_iterate=None, residuals=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residuals = residuals


class OracleSizeError(IrsError, ValueError):
    """Raised when an exhaustive enumeration would exceed the guard limit."""
