"""Loss weights, the Gaussian-consistency dispatcher and the combined objective."""

from dataclasses import dataclass
from enum import Enum

from src.losses.errors import LossError
from src.losses.gaussian import (
    GaussianKind,
    gaussian_mle,
    gaussian_mle_backward,
    kl_loss,
    kl_loss_grad,
    pnorm_loss,
    pnorm_loss_grad,
    w2_1d_loss,
    w2_1d_loss_grad,
    w2_md_loss,
    w2_md_loss_grad,
)
from src.neuralcore.matrix import Matrix


class GauVariant(str, Enum):
    """Which Gaussian-consistency term regularises the inverse batch."""

    W2_MD = "w2_md"
    W2_1D = "w2_1d"
    PNORM = "pnorm"
    KL = "kl"
    ZDISC = "zdisc"
    NONE = "none"

    @property
    def uses_estimate(self) -> bool:
        return self not in (GauVariant.ZDISC, GauVariant.NONE)


@dataclass(frozen=True)
class LossWeights:
    lambda_re: float
    lambda_gau: float
    dim_ratio: float

    def __post_init__(self) -> None:
        if self.lambda_re < 0 or self.lambda_gau < 0:
            raise LossError("loss weights must be non-negative")

    @classmethod
    def for_dims(
        cls, lambda_re: float, lambda_gau: float, target_dim: int, latent_dim: int
    ) -> "LossWeights":
        return cls(lambda_re, lambda_gau, target_dim / latent_dim)


def total_objective(adv: float, recon: float, gau: float, w: LossWeights) -> float:
    return adv + w.lambda_re * recon + w.lambda_gau * gau


def gaussian_consistency(
    z_tilde: Matrix, variant: GauVariant, p: float = 2.0
) -> tuple[float, Matrix]:
    """Distance of the Gaussian fitted to ``z_tilde`` from N(0, I), and its batch gradient."""
    variant = GauVariant(variant)
    if variant is GauVariant.W2_1D:
        est = gaussian_mle(z_tilde, GaussianKind.DIAGONAL)
        value = w2_1d_loss(est)
        grad_mean, grad_second = w2_1d_loss_grad(est)
    elif variant is GauVariant.W2_MD:
        est = gaussian_mle(z_tilde, GaussianKind.FULL)
        value = w2_md_loss(est)
        grad_mean, grad_second = w2_md_loss_grad(est)
    elif variant is GauVariant.PNORM:
        est = gaussian_mle(z_tilde, GaussianKind.FULL)
        value = pnorm_loss(est, p)
        grad_mean, grad_second = pnorm_loss_grad(est, p)
    elif variant is GauVariant.KL:
        est = gaussian_mle(z_tilde, GaussianKind.FULL)
        value = kl_loss(est)
        grad_mean, grad_second = kl_loss_grad(est)
    else:
        raise LossError(f"variant {variant.value} has no closed-form Gaussian distance")
    return value, gaussian_mle_backward(z_tilde, est, grad_mean, grad_second)
