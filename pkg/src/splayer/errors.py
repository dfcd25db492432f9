"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A model, problem, or run was set up inconsistently (bad shapes, unknown ids, bad flags)."""


class TrainingDivergenceError(RuntimeError):
    """The training loss became non-finite.

    Carries the epoch at which divergence was detected and the last finite
    loss seen before it, so runs fail loudly with context instead of
    silently continuing with NaNs.
    """

    def __init__(self, epoch: int, last_finite_loss: float | None):
        self.epoch = epoch
        self.last_finite_loss = last_finite_loss
        detail = f"training loss became non-finite at epoch {epoch}"
        if last_finite_loss is not None:
            detail += f" (last finite loss {last_finite_loss:.6g})"
        super().__init__(detail)
