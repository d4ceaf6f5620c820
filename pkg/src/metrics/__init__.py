"""Mode coverage, generation quality and normality diagnostics."""

from src.metrics.errors import StatisticsError
from src.metrics.evaluate import evaluate, generate, inverse_normality
from src.metrics.modes import (
    BAD,
    DEFAULT_RADIUS_FACTOR,
    ModeAssignment,
    assign_modes,
    modes_covered,
    quality,
    reverse_kl,
)
from src.metrics.normality import (
    SW_MAX_N,
    SW_MIN_N,
    ks_statistic,
    normal_cdf,
    normal_quantile,
    qq_data,
    shapiro_wilk,
    shapiro_wilk_weights,
)
from src.schemas.reports import MetricsReport
