"""Exception hierarchy shared by the numerical modules."""

from __future__ import annotations


class GBZError(Exception):
    """Base class for numerical failures raised by this package."""


class ConvergenceError(GBZError):
    """An iterative kernel hit its iteration cap."""

    def __init__(self, message: str, order: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.order = order
        self.residual = residual


class DegenerateEquationError(GBZError, ValueError):
    """Leading coefficient of a polynomial equation vanishes."""


class ReciprocalDegenerateError(GBZError, ValueError):
    """Operation requires nonzero off-diagonal coefficients."""


class OnBoundaryError(GBZError):
    """Point lies on the determinant curve where the winding number is undefined."""


class ConsistencyError(GBZError):
    """Two independent computations that must agree did not."""


class ConfluentModeError(GBZError):
    """The two quasiperiodicities of a spectral point coincide."""


class OverflowGuardError(GBZError):
    """Cumulative products would leave the double-precision range."""


class ExteriorPointError(GBZError, ValueError):
    """Spectral point lies outside the Toeplitz-operator spectrum."""
