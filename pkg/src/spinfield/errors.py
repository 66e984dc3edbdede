"""Exception types raised across the package."""


class SpinFieldError(Exception):
    """Base class for all package errors."""


class DomainError(SpinFieldError, ValueError):
    """Argument outside the domain of a special function."""


class ChartDomainError(SpinFieldError, ValueError):
    """Point lies outside a chart (too close to a rotated pole)."""


class BandLimitError(SpinFieldError, ValueError):
    """Quadrature rule too coarse for the requested band limit."""


class ResourceError(SpinFieldError, RuntimeError):
    """Requested object would exceed a configured size cap."""


class SpinMismatchError(SpinFieldError, ValueError):
    """Operands carry incompatible spin weights."""


class NegativeCoefficientError(SpinFieldError, ValueError):
    """Covariance spectrum has a negative coefficient."""


class RealityError(SpinFieldError, ValueError):
    """Real-constrained draws requested for a field that cannot be real."""


class ShapeMismatchError(SpinFieldError, ValueError):
    """Coefficient draw does not match the spectrum it is combined with."""
