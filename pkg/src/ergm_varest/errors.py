"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """Raised when an exact oracle is asked to enumerate beyond its size cap."""


class SeparationError(ValueError):
    """Raised when a logistic fit is degenerate (empty or complete graph)."""


class NonConvergenceError(RuntimeError):
    """Raised only when the caller asked for non-convergence to be fatal."""
