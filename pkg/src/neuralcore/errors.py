"""Errors raised by the network substrate."""


class NeuralCoreError(Exception):
    """Base class for neuralcore failures."""


class ShapeMismatchError(NeuralCoreError, ValueError):
    """Raised when array shapes are incompatible with a layer or operation."""


class NonFiniteError(NeuralCoreError, ValueError):
    """Raised when a NaN or Inf appears in an input, output or gradient."""

    def __init__(self, message: str, what: str = ""):
        super().__init__(message)
        self.what = what


class MissingForwardError(NeuralCoreError, RuntimeError):
    """Raised when backward is called without a matching forward."""


class NetworkFormatError(NeuralCoreError, ValueError):
    """Raised when a serialised network or optimizer document is malformed."""
