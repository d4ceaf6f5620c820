"""Errors raised by the objective terms."""


class LossError(ValueError):
    """Base class for invalid loss inputs."""


class NotPositiveSemidefiniteError(LossError):
    """Raised when a matrix expected to be PSD has a clearly negative eigenvalue."""


class SingularCovarianceError(LossError):
    """Raised when a covariance stays singular after regularisation."""
