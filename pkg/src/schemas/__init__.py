"""Pydantic schemas shared by training, evaluation and the CLI."""

from src.schemas.config import (
    SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    TrainConfig,
    load_experiment_config,
)
from src.schemas.reports import MetricsReport, StepReport
