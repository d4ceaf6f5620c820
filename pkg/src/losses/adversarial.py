"""Binary cross-entropy losses for D, G and the latent discriminator D_z.

Probabilities are clamped to [PROB_EPS, 1 - PROB_EPS] before taking logs;
gradients are evaluated at the clamped value.
"""

import numpy as np
from numpy.typing import ArrayLike

from src.losses.errors import LossError
from src.neuralcore.matrix import Vector

PROB_EPS = 1e-7


def _probabilities(p: ArrayLike, name: str) -> Vector:
    arr = np.asarray(p, dtype=np.float64)
    if arr.size == 0:
        raise LossError(f"{name} batch is empty")
    if not np.all(np.isfinite(arr)):
        raise LossError(f"{name} has non-finite entries")
    return np.clip(arr, PROB_EPS, 1.0 - PROB_EPS)


def d_loss(d_real: ArrayLike, d_fake: ArrayLike) -> float:
    """-mean(log D(x)) - mean(log(1 - D(G(z))))."""
    real = _probabilities(d_real, "d_real")
    fake = _probabilities(d_fake, "d_fake")
    return float(-np.mean(np.log(real)) - np.mean(np.log1p(-fake)))


def d_loss_grad(d_real: ArrayLike, d_fake: ArrayLike) -> tuple[Vector, Vector]:
    """Gradients of d_loss w.r.t. each probability, shaped like the inputs."""
    real = _probabilities(d_real, "d_real")
    fake = _probabilities(d_fake, "d_fake")
    return -1.0 / (real.size * real), 1.0 / (fake.size * (1.0 - fake))


def g_adv_loss(d_fake: ArrayLike) -> float:
    """Non-saturating generator loss -mean(log D(G(z)))."""
    fake = _probabilities(d_fake, "d_fake")
    return float(-np.mean(np.log(fake)))


def g_adv_loss_grad(d_fake: ArrayLike) -> Vector:
    fake = _probabilities(d_fake, "d_fake")
    return -1.0 / (fake.size * fake)


def zdisc_losses(dz_real: ArrayLike, dz_fake: ArrayLike) -> tuple[float, float]:
    """(D_z loss, F's adversarial loss) for the latent discriminator.

    D_z separates true Gaussian draws from inverses F(x); it shares the
    discriminator/generator losses above.
    """
    return d_loss(dz_real, dz_fake), g_adv_loss(dz_fake)
