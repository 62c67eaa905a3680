"""Exception types shared across the package."""


class PamheatError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedError(PamheatError):
    """The requested computation is outside the supported catalog."""


class IndeterminateError(PamheatError):
    """Neither analytic classification nor quadrature reached a verdict."""


class DensityUnavailableError(PamheatError):
    """Transition densities do not exist (Hawkes condition fails)."""


class InvalidOrderError(PamheatError):
    """Hermite zero requested for an odd or too-small order."""


class InfiniteAmplitudeError(PamheatError):
    """The resolvent amplitude diverges (q + b <= d)."""


class NotApplicableError(PamheatError):
    """A theorem's hypotheses are not met by the supplied model."""


class QuadratureError(PamheatError):
    """Adaptive quadrature failed to converge.

    Carries the partial value and the integrator's error estimate so
    callers can decide whether the partial result is still usable.
    """

    def __init__(self, message, partial=None, error_estimate=None):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate
