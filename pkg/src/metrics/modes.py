"""Mode assignment, generation quality and reverse KL against a known mixture."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.metrics.errors import StatisticsError
from src.neuralcore.matrix import Matrix
from src.synthdata.mixtures import GaussianMixture

BAD = -1
DEFAULT_RADIUS_FACTOR = 3.0


@dataclass(frozen=True, eq=False)
class ModeAssignment:
    """Per-sample mode labels (BAD for samples near no center) and per-mode counts."""

    labels: NDArray[np.int64]
    counts: NDArray[np.int64]
    bad_count: int

    @property
    def total(self) -> int:
        return int(self.labels.size)

    @property
    def valid_count(self) -> int:
        return int(self.counts.sum())


def assign_modes(
    samples: Matrix, mix: GaussianMixture, radius_factor: float = DEFAULT_RADIUS_FACTOR
) -> ModeAssignment:
    """Label each sample with its nearest center if within radius_factor * std."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] == 0 or samples.shape[1] != 2:
        raise StatisticsError(f"expected a non-empty n x 2 sample matrix, got {samples.shape}")

    sq_dist = np.stack([np.sum((samples - c) ** 2, axis=1) for c in mix.centers], axis=1)
    nearest = np.argmin(sq_dist, axis=1)
    within = sq_dist[np.arange(len(samples)), nearest] <= (radius_factor * mix.std) ** 2
    labels = np.where(within, nearest, BAD).astype(np.int64)
    counts = np.bincount(labels[within], minlength=mix.n_modes).astype(np.int64)
    return ModeAssignment(labels, counts, int(np.count_nonzero(~within)))


def quality(a: ModeAssignment) -> float:
    """Fraction of samples that landed within the radius of some mode."""
    return a.valid_count / a.total


def modes_covered(a: ModeAssignment, min_count: int = 1) -> int:
    return int(np.count_nonzero(a.counts >= min_count))


def reverse_kl(a: ModeAssignment, mode_count: int) -> float:
    """sum_i p_i ln(p_i m) with p_i normalised by all samples, Bad included.

    Negative values occur exactly when some samples are Bad.
    """
    if mode_count < 1:
        raise StatisticsError(f"mode_count must be at least 1, got {mode_count}")
    p = a.counts / a.total
    p = p[p > 0]
    return float(np.sum(p * np.log(p * mode_count)))
