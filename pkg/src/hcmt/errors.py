"""Exception types shared across the package."""


class HcmtError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(HcmtError):
    """A parameter combination is invalid or a config file is malformed."""


class RangeError(ConfigError):
    """A scan range is empty, inverted, or outside the attainable set."""


class NumericalError(HcmtError):
    """A numerical routine failed to converge or met an ill-posed input."""


class NotPositiveDefiniteError(NumericalError):
    """A covariance matrix stayed non positive definite after jitter."""

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DataError(HcmtError):
    """Input data violates a documented precondition."""
