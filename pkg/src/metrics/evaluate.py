"""One evaluation pass over a trainer state."""

from typing import TYPE_CHECKING

import numpy as np

from src.config import settings
from src.losses import GaussianKind, gaussian_mle, kl_loss, w2_md_loss
from src.metrics.errors import StatisticsError
from src.metrics.modes import (
    DEFAULT_RADIUS_FACTOR,
    assign_modes,
    modes_covered,
    quality,
    reverse_kl,
)
from src.metrics.normality import SW_MAX_N, ks_statistic, shapiro_wilk
from src.neuralcore import Matrix, Mlp
from src.schemas.reports import MetricsReport
from src.synthdata import GaussianMixture, Rng, sample_mixture, sample_standard_normal
from src.utils.logging import get_logger

if TYPE_CHECKING:
    from src.training.state import TrainerState

logger = get_logger(__name__)


def generate(g: Mlp, n: int, rng: Rng, chunk_size: int | None = None) -> Matrix:
    """G(z) for n fresh latents, computed in chunks without touching G's caches.

    Chunk i draws from child stream i of ``rng``, so a smaller n yields a prefix
    of the rows a larger n yields.
    """
    chunk_size = chunk_size or settings.eval_chunk_size
    n_chunks = -(-n // chunk_size)
    parts = []
    for i, stream in enumerate(rng.split(n_chunks)):
        rows = min(chunk_size, n - i * chunk_size)
        parts.append(g.predict(sample_standard_normal(rows, g.in_features, stream)))
    return np.vstack(parts)


def inverse_normality(
    z_tilde: Matrix, sw_max_n: int = SW_MAX_N
) -> tuple[list[float], list[float]]:
    """Per-dimension Shapiro-Wilk W (first ``sw_max_n`` rows) and KS D (all rows).

    Raises StatisticsError when a dimension of the first ``sw_max_n`` rows is constant.
    """
    sw, ks = [], []
    for m in range(z_tilde.shape[1]):
        column = z_tilde[:, m]
        head = column[:sw_max_n]
        if np.ptp(head) == 0.0:
            raise StatisticsError(f"inverse dimension {m + 1} has zero variance")
        sw.append(shapiro_wilk(head))
        ks.append(ks_statistic(column))
    return sw, ks


def evaluate(
    state: "TrainerState",
    mix: GaussianMixture,
    n_gen: int,
    n_real: int,
    rng: Rng,
    *,
    radius_factor: float = DEFAULT_RADIUS_FACTOR,
    min_count: int = 1,
    sw_max_n: int = SW_MAX_N,
) -> MetricsReport:
    """Mode statistics of G(z) on n_gen latents and normality of F(x) on n_real real draws.

    Only ``predict`` is used, so the networks and their caches are unchanged.
    """
    if n_gen <= 0 or n_real < 3:
        raise ValueError(f"need n_gen > 0 and n_real >= 3, got {n_gen} and {n_real}")

    gen_rng, real_rng = rng.split(2)
    generated = generate(state.g, n_gen, gen_rng)
    assignment = assign_modes(generated, mix, radius_factor)

    z_tilde = state.f.predict(sample_mixture(mix, n_real, real_rng))
    sw, ks = inverse_normality(z_tilde, sw_max_n)
    fit = gaussian_mle(z_tilde, GaussianKind.FULL)

    report = MetricsReport(
        step=state.step,
        n_modes=mix.n_modes,
        modes_covered=modes_covered(assignment, min_count),
        quality=quality(assignment),
        reverse_kl=reverse_kl(assignment, mix.n_modes),
        sw_per_dim=sw,
        ks_per_dim=ks,
        sw_mean=float(np.mean(sw)),
        sw_min=float(np.min(sw)),
        inverse_w2=max(w2_md_loss(fit), 0.0),
        inverse_kl=max(kl_loss(fit), 0.0),
    )
    logger.debug("Evaluation completed", **report.model_dump(exclude={"sw_per_dim", "ks_per_dim"}))
    return report
