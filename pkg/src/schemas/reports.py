"""Result records produced by training and evaluation."""

from pydantic import BaseModel, Field, model_validator


class StepReport(BaseModel):
    """Losses observed during one train_step."""

    step: int = Field(ge=1)
    d_loss: float
    dz_loss: float | None = None
    g_adv: float
    recon: float
    gau: float
    total: float


class MetricsReport(BaseModel):
    """One evaluation pass: mode statistics of G(z) and normality of F(x)."""

    step: int = Field(default=0, ge=0)
    n_modes: int = Field(gt=0)
    modes_covered: int = Field(ge=0)
    quality: float = Field(ge=0.0, le=1.0)
    reverse_kl: float
    sw_per_dim: list[float]
    ks_per_dim: list[float]
    sw_mean: float
    sw_min: float
    inverse_w2: float = Field(ge=0.0)
    inverse_kl: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_modes(self) -> "MetricsReport":
        if self.modes_covered > self.n_modes:
            raise ValueError("modes_covered cannot exceed the number of mixture modes")
        return self

    def csv_row(self) -> dict[str, float | int]:
        """Flat row in metrics.csv column order."""
        row: dict[str, float | int] = {
            "step": self.step,
            "modes": self.modes_covered,
            "quality": self.quality,
            "rkl": self.reverse_kl,
        }
        row.update({f"sw_{m + 1}": v for m, v in enumerate(self.sw_per_dim)})
        row.update({f"ks_{m + 1}": v for m, v in enumerate(self.ks_per_dim)})
        return row
