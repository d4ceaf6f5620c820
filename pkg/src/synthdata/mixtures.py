"""Ring and Grid Gaussian mixtures used as ground-truth targets."""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from src.neuralcore.matrix import Matrix
from src.synthdata.rng import Rng, box_muller

RING_MODES = 8
RING_RADIUS = 2.0
RING_STD = 0.001
GRID_STD = 0.0025
GRID_SPACING = 2.0


class Dataset(str, Enum):
    RING = "ring"
    GRID = "grid"


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Equal-weight isotropic mixture in R^2."""

    centers: Matrix
    std: float

    def __post_init__(self) -> None:
        centers = np.asarray(self.centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[1] != 2 or centers.shape[0] == 0:
            raise ValueError(f"centers must be a non-empty K x 2 array, got {centers.shape}")
        if not self.std > 0:
            raise ValueError(f"std must be positive, got {self.std}")
        if len(np.unique(centers, axis=0)) != len(centers):
            raise ValueError("mixture centers must be pairwise distinct")
        object.__setattr__(self, "centers", centers)

    @property
    def n_modes(self) -> int:
        return int(self.centers.shape[0])


def ring_mixture(std: float = RING_STD, radius: float = RING_RADIUS) -> GaussianMixture:
    """Eight modes at (r cos(i pi/4), r sin(i pi/4)), i = 1..8."""
    angles = np.arange(1, RING_MODES + 1) * np.pi / 4.0
    centers = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    return GaussianMixture(centers, std)


def grid_mixture(std: float = GRID_STD, spacing: float = GRID_SPACING) -> GaussianMixture:
    """25 modes at (spacing*i, spacing*j) for i, j in -2..2."""
    steps = np.arange(-2, 3, dtype=np.float64)
    centers = np.array([(spacing * i, spacing * j) for i in steps for j in steps])
    return GaussianMixture(centers, std)


def mixture_for(dataset: Dataset, std: float | None = None) -> GaussianMixture:
    if Dataset(dataset) is Dataset.RING:
        return ring_mixture() if std is None else ring_mixture(std=std)
    return grid_mixture() if std is None else grid_mixture(std=std)


def sample_mixture_labeled(
    mix: GaussianMixture, n: int, rng: Rng
) -> tuple[Matrix, NDArray[np.int64]]:
    """Draw n samples and the index of the mode each came from.

    Each sample consumes three uniforms in order: the mode choice, then the
    Box-Muller pair for its noise. A longer draw therefore extends a shorter
    one from the same state.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    u = rng.uniform((n, 3))
    modes = np.minimum((u[:, 0] * mix.n_modes).astype(np.int64), mix.n_modes - 1)
    noise_x, noise_y = box_muller(u[:, 1], u[:, 2])
    samples = mix.centers[modes] + mix.std * np.column_stack([noise_x, noise_y])
    return samples, modes


def sample_mixture(mix: GaussianMixture, n: int, rng: Rng) -> Matrix:
    samples, _ = sample_mixture_labeled(mix, n, rng)
    return samples
