"""Cycle-consistency reconstruction loss."""

import numpy as np

from src.neuralcore.errors import ShapeMismatchError
from src.neuralcore.matrix import Matrix


def cycle_l1(original: Matrix, cycled: Matrix) -> tuple[float, Matrix]:
    """Mean over rows of ||original - cycled||_1 and its gradient w.r.t. ``cycled``."""
    original = np.asarray(original, dtype=np.float64)
    cycled = np.asarray(cycled, dtype=np.float64)
    if original.shape != cycled.shape or original.ndim != 2:
        raise ShapeMismatchError(
            f"cannot compare {original.shape} with its reconstruction {cycled.shape}"
        )
    n = original.shape[0]
    diff = original - cycled
    value = float(np.abs(diff).sum(axis=1).mean())
    return value, -np.sign(diff) / n


def recon_loss(
    z: Matrix, z_cycled: Matrix, x: Matrix, x_cycled: Matrix, dim_ratio: float
) -> float:
    """E||z - F(G(z))||_1 + (d/M) E||x - G(F(x))||_1."""
    latent_term, _ = cycle_l1(z, z_cycled)
    data_term, _ = cycle_l1(x, x_cycled)
    return latent_term + dim_ratio * data_term
