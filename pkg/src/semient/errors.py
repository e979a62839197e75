class EntropyError(Exception):
    """Base class for errors raised by this package."""


class DomainError(EntropyError, ValueError):
    """Input outside the domain of an operation."""


class ResourceError(EntropyError, RuntimeError):
    """A configured size cap was exceeded.

    ``partial`` carries whatever was computed before the cap was hit
    (for trajectory engines: the list of norm values so far).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


class NumericError(EntropyError, ArithmeticError):
    """Root iteration did not converge; ``partial`` holds the last iterate."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class UnsupportedEndomorphism(EntropyError, NotImplementedError):
    """The endomorphism leaves the finitely representable class."""


class PropertyViolation(EntropyError, AssertionError):
    """A checked mathematical invariant failed."""
