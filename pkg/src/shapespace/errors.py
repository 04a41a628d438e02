"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (CLI exit code 1),
numerical breakdowns from :class:`NumericalError` (CLI exit code 2).
"""


class ShapeSpaceError(Exception):
    """Base class for all package errors."""


class ValidationError(ShapeSpaceError, ValueError):
    """Input violates a documented invariant or precondition."""


class NumericalError(ShapeSpaceError, ArithmeticError):
    """A computation broke down (singular system, non-finite energy, ...)."""


class DegenerateCurveError(ValidationError):
    """Consecutive samples coincide, so the curve is not a discrete immersion."""


class AmbiguousAlignmentError(ValidationError):
    """Rotation normalization is undefined for an isotropic second moment."""


class GridMismatchError(ValidationError):
    """Two objects were built on incompatible sampling grids."""


class SolverError(NumericalError):
    """A linear solve for a projection failed."""


class OptimizerAbort(NumericalError):
    """Path straightening hit a degenerate or non-finite state."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
