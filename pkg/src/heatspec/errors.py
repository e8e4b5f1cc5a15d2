"""Exception hierarchy shared by every module.

The CLI maps these onto its exit-code contract: validation problems exit 1,
numeric failures exit 3.
"""


class HeatSpecError(Exception):
    """Base class for all package errors."""


class DomainError(HeatSpecError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedError(HeatSpecError, NotImplementedError):
    """The requested variant/method combination is not available."""


class NumericError(HeatSpecError, ArithmeticError):
    """An iterative computation failed to reach its tolerance.

    ``residual`` carries the last error estimate when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BudgetError(NumericError):
    """A truncation budget could not be certified within the term cap."""


class ConstructionError(HeatSpecError, ValueError):
    """A graph could not be built from the given point cloud."""

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class SpectralRangeError(NumericError):
    """Eigenvalues fall outside the range a transform requires."""


class SingularityError(DomainError):
    """The formula is singular at the requested point."""


class ApproximationWarning(UserWarning):
    """The returned value is a truncated approximation, not the exact kernel."""
