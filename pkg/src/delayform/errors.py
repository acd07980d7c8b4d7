"""Exception and warning types raised across the package."""


class DelayFormError(Exception):
    """Base class for all errors raised by delayform."""


class InvalidParameterError(DelayFormError, ValueError):
    pass


class InvalidTopologyError(DelayFormError, ValueError):
    pass


class NumericalFailureError(DelayFormError):
    """A dense linear-algebra routine failed or returned an inaccurate result."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IncompleteSpectrumError(DelayFormError):
    """Root search could not match the argument-principle count.

    ``roots`` holds whatever was found, ``expected`` the contour count.
    """

    def __init__(self, message, roots=(), expected=None, found=None):
        super().__init__(message)
        self.roots = tuple(roots)
        self.expected = expected
        self.found = found


class ContourResolutionError(DelayFormError):
    pass


class DegenerateDelayChannelError(DelayFormError, ZeroDivisionError):
    pass


class UnsupportedParametersError(DelayFormError, ValueError):
    pass


class UnsupportedTopologyError(UnsupportedParametersError):
    """The Laplacian has complex eigenvalues, so closed-form classification does not apply."""


class InternalConsistencyError(DelayFormError):
    pass


class InapplicableClassError(DelayFormError, ValueError):
    pass


class PoleError(DelayFormError, ZeroDivisionError):
    pass


class EmptyCurveError(DelayFormError):
    pass


class NoStableSeedError(DelayFormError):
    """The origin of the lambda grid is not stable; ``field`` is still attached."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class TheoremHypothesisError(DelayFormError, ValueError):
    pass


class IntersectionNotFoundError(DelayFormError):
    def __init__(self, message, j=None):
        super().__init__(message)
        self.j = j


class DegenerateTangentError(DelayFormError):
    pass


class FitWindowExhaustedError(DelayFormError):
    pass


class ConfigError(DelayFormError, ValueError):
    """Configuration document failed validation; ``path`` locates the field."""

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class NonDiagonalizableWarning(UserWarning):
    pass
