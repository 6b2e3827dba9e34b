"""Exception types shared across the package."""


class HybridTailError(Exception):
    """Base class for all package errors."""


class DomainError(HybridTailError, ValueError):
    """Argument lies outside the support or domain of a function."""


class ConstraintError(HybridTailError, ValueError):
    """A free parameter vector does not map to a valid model."""


class InputError(HybridTailError, ValueError):
    """Data handed to an estimator or command is unusable."""


class ConvergenceError(HybridTailError, RuntimeError):
    """An optimizer failed; ``best`` holds the best iterate it reached."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
