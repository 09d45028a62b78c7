"""Exception types shared across the package."""


class GraphonSpectraError(Exception):
    """Base class for all package errors."""


class ValidationError(GraphonSpectraError):
    """Bad input: out-of-domain coordinate, malformed matrix, invalid config."""


class CapacityError(GraphonSpectraError):
    """A size limit on exhaustive enumeration or exact computation was exceeded."""


class ConvergenceError(GraphonSpectraError):
    """An iterative solver failed to reach its tolerance.

    Carries the final residual so callers can report how close it got.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
