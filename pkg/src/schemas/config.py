"""Experiment configuration schemas loaded from JSON."""

import hashlib
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.losses.objective import GauVariant, LossWeights
from src.neuralcore.optim import LrSchedule, scheduled_learning_rate
from src.synthdata.mixtures import Dataset, GaussianMixture, mixture_for

SCHEMA_VERSION = 1

# Source draws used for test-time generation, per dataset.
DEFAULT_N_GEN = {Dataset.RING: 50_000, Dataset.GRID: 100_000}


class ConfigError(ValueError):
    """Raised when a configuration file cannot be read or fails validation."""


class TrainConfig(BaseModel):
    """Everything that determines a single training run."""

    model_config = ConfigDict(extra="forbid")

    latent_dim: int = Field(default=2, gt=0)
    target_dim: int = Field(default=2, gt=0)
    hidden_sizes: list[int] = Field(default_factory=lambda: [100, 200, 100], min_length=1)
    batch_size: int = Field(default=256, ge=2)
    steps: int = Field(default=24_000, ge=0)
    eval_every: int = Field(default=1_000, gt=0)
    d_steps: int = Field(default=1, gt=0)

    lambda_re: float = Field(default=1.0, ge=0)
    lambda_gau: float = Field(default=1.0, ge=0)
    gau_variant: GauVariant = Field(default=GauVariant.W2_MD)
    pnorm_p: float = Field(default=2.0, ge=1)

    lr: float = Field(default=2e-4, gt=0)
    lr_schedule: LrSchedule = Field(default=LrSchedule.COSINE)
    lr_final: float = Field(default=1e-6, gt=0)
    beta1: float = Field(default=0.5, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_epsilon: float = Field(default=1e-8, gt=0)

    seed: int = Field(default=0, ge=0)
    dataset: Dataset = Field(default=Dataset.RING)
    mixture_std: float | None = Field(default=None, gt=0)
    generator_init_scale: float = Field(default=1.0, gt=0)

    @field_validator("hidden_sizes")
    @classmethod
    def validate_hidden_sizes(cls, v: list[int]) -> list[int]:
        if any(size <= 0 for size in v):
            raise ValueError("hidden layer sizes must be positive")
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "TrainConfig":
        if self.target_dim != 2:
            raise ValueError("the Ring and Grid mixtures live in R^2; target_dim must be 2")
        if self.lr_final > self.lr:
            raise ValueError(f"lr_final {self.lr_final} exceeds the initial lr {self.lr}")
        if self.gau_variant is GauVariant.NONE:
            self.lambda_gau = 0.0
        return self

    def mixture(self) -> GaussianMixture:
        return mixture_for(self.dataset, self.mixture_std)

    def learning_rate(self, step: int) -> float:
        """Learning rate used by every optimizer at 1-based ``step``."""
        return scheduled_learning_rate(self.lr_schedule, self.lr, self.lr_final, step, self.steps)

    def loss_weights(self) -> LossWeights:
        return LossWeights.for_dims(
            self.lambda_re, self.lambda_gau, self.target_dim, self.latent_dim
        )


class ExperimentConfig(TrainConfig):
    """A TrainConfig plus evaluation, seeding and output settings."""

    schema_version: Literal[1] = SCHEMA_VERSION
    output_dir: str = Field(default="runs/default", min_length=1)
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    variants: list[GauVariant] | None = Field(default=None, min_length=1)

    n_gen: int | None = Field(default=None, gt=0)
    n_real: int = Field(default=500, ge=3)
    radius_factor: float = Field(default=3.0, gt=0)
    min_count: int = Field(default=1, ge=1)
    sw_max_n: int = Field(default=5000, ge=3, le=5000)

    save_checkpoints: bool = True
    export_qq: bool = True
    export_dataset: bool = False
    dataset_dump_size: int = Field(default=100_000, gt=0)

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v: list[int]) -> list[int]:
        if any(s < 0 for s in v):
            raise ValueError("seeds must be non-negative")
        if len(set(v)) != len(v):
            raise ValueError("seeds must be distinct")
        return v

    @model_validator(mode="after")
    def check_sweep(self) -> "ExperimentConfig":
        swept = [v for v in self.variants or [] if v is not GauVariant.NONE]
        if swept and self.gau_variant is GauVariant.NONE:
            raise ValueError("sweeping Gaussian variants needs a base gau_variant other than none")
        return self

    @property
    def eval_n_gen(self) -> int:
        return self.n_gen if self.n_gen is not None else DEFAULT_N_GEN[self.dataset]

    def train_config(self, seed: int, variant: GauVariant | None = None) -> TrainConfig:
        """The single-run config for one seed (and optionally a swept variant)."""
        fields = self.model_dump(include=set(TrainConfig.model_fields))
        fields["seed"] = seed
        if variant is not None:
            fields["gau_variant"] = variant
        return TrainConfig.model_validate(fields)


def load_experiment_config(path: str | Path) -> tuple[ExperimentConfig, str]:
    """Parse a JSON config file; returns the config and the sha256 of its bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        config = ExperimentConfig.model_validate_json(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e
    return config, hashlib.sha256(raw).hexdigest()
