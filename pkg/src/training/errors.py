"""Training failures."""


class TrainingDivergedError(RuntimeError):
    """A loss or gradient became non-finite; training stops at ``step``."""

    def __init__(self, step: int, loss: str, detail: str = ""):
        message = f"training diverged at step {step}: {loss} is not finite"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.step = step
        self.loss = loss


class CheckpointError(ValueError):
    """Raised when a checkpoint cannot be written, parsed or validated."""
