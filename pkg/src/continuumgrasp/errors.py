"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A constructor or operation received an out-of-range parameter."""


class GridMismatchError(ValueError):
    """Sampled data does not line up with the expected arclength grid."""


class StepSizeError(RuntimeError):
    """The sweep solver diverged; retry with a smaller step size eta."""


class ConvergenceError(RuntimeError):
    """An inner solve failed to converge within its iteration budget."""

    def __init__(self, message, angles=None, wrench=None):
        super().__init__(message)
        self.angles = angles
        self.wrench = wrench
