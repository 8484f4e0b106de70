"""Exception types shared across the toolkit."""


class EnkfLabError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(EnkfLabError):
    """Operands have incompatible or invalid shapes."""


class SingularMatrixError(EnkfLabError):
    """A matrix required to be (semi)definite or invertible is not."""


class DivergenceError(EnkfLabError):
    """A propagated state became non-finite.

    Carries the integration substep (and optionally the ensemble member)
    at which the blowup was detected.
    """

    def __init__(self, message, step=None, member=None):
        super().__init__(message)
        self.step = step
        self.member = member


class ConfigError(EnkfLabError):
    """A configuration document failed to parse or validate."""
