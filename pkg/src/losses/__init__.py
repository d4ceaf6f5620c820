"""Adversarial, reconstruction and Gaussian-consistency objective terms."""

from src.losses.adversarial import (
    PROB_EPS,
    d_loss,
    d_loss_grad,
    g_adv_loss,
    g_adv_loss_grad,
    zdisc_losses,
)
from src.losses.errors import LossError, NotPositiveSemidefiniteError, SingularCovarianceError
from src.losses.gaussian import (
    GaussianEstimate,
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
from src.losses.linalg import jacobi_eigh, sqrt_psd, sqrt_psd_backward
from src.losses.objective import (
    GauVariant,
    LossWeights,
    gaussian_consistency,
    total_objective,
)
from src.losses.reconstruction import cycle_l1, recon_loss
