"""Gaussian fits of inverse batches and their distances to N(0, I).

Every distance comes with a ``*_grad`` companion returning the gradient with
respect to the estimate's parameters, (d mean, d cov) for full estimates and
(d mean, d std) for diagonal ones. ``gaussian_mle_backward`` carries those
gradients back to the batch.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.losses.errors import LossError, SingularCovarianceError
from src.losses.linalg import (
    EIGEN_CLAMP_TOL,
    check_symmetric,
    jacobi_eigh,
    relative_tol,
    sqrt_psd,
    sqrt_psd_backward,
)
from src.neuralcore.matrix import Matrix, Vector

COV_SYMMETRY_TOL = 1e-12
KL_MIN_EIGEN = 1e-8
KL_RIDGE = 1e-6


class GaussianKind(str, Enum):
    FULL = "full"
    DIAGONAL = "diagonal"


@dataclass(frozen=True, eq=False)
class GaussianEstimate:
    """(mean, cov) for FULL or (mean, diag_std) for DIAGONAL."""

    mean: Vector
    kind: GaussianKind
    cov: Matrix | None = None
    diag_std: Vector | None = None

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "kind", GaussianKind(self.kind))
        m = mean.size
        if self.kind is GaussianKind.FULL:
            if self.cov is None:
                raise LossError("a full estimate needs a covariance")
            cov = np.asarray(self.cov, dtype=np.float64)
            if cov.shape != (m, m):
                raise LossError(f"covariance shape {cov.shape} does not match mean of size {m}")
            cov = check_symmetric(cov, COV_SYMMETRY_TOL)
            if jacobi_eigh(cov)[0][0] < -relative_tol(cov, EIGEN_CLAMP_TOL):
                raise LossError("covariance is not positive semidefinite")
            object.__setattr__(self, "cov", cov)
        else:
            if self.diag_std is None:
                raise LossError("a diagonal estimate needs per-dimension std")
            std = np.asarray(self.diag_std, dtype=np.float64).reshape(-1)
            if std.size != m or np.any(std < 0):
                raise LossError("diag_std must be non-negative with one entry per dimension")
            object.__setattr__(self, "diag_std", std)

    @property
    def dim(self) -> int:
        return int(self.mean.size)

    @classmethod
    def full(cls, mean: Vector, cov: Matrix) -> "GaussianEstimate":
        return cls(mean, GaussianKind.FULL, cov=cov)

    @classmethod
    def diagonal(cls, mean: Vector, diag_std: Vector) -> "GaussianEstimate":
        return cls(mean, GaussianKind.DIAGONAL, diag_std=diag_std)

    def to_full(self) -> "GaussianEstimate":
        if self.kind is GaussianKind.FULL:
            return self
        assert self.diag_std is not None
        return GaussianEstimate.full(self.mean, np.diag(self.diag_std**2))


def _require(est: GaussianEstimate, kind: GaussianKind) -> None:
    if est.kind is not kind:
        raise LossError(f"expected a {kind.value} estimate, got {est.kind.value}")


def gaussian_mle(z_batch: Matrix, kind: GaussianKind = GaussianKind.FULL) -> GaussianEstimate:
    """Maximum-likelihood mean and (biased, divisor N) covariance of a batch."""
    z = np.asarray(z_batch, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 2:
        raise LossError(f"need a batch of at least 2 rows, got shape {z.shape}")
    n = z.shape[0]
    mean = z.mean(axis=0)
    centered = z - mean
    if GaussianKind(kind) is GaussianKind.FULL:
        cov = centered.T @ centered / n
        return GaussianEstimate.full(mean, 0.5 * (cov + cov.T))
    return GaussianEstimate.diagonal(mean, np.sqrt(np.mean(centered**2, axis=0)))


def gaussian_mle_backward(
    z_batch: Matrix, est: GaussianEstimate, grad_mean: Vector, grad_second: Matrix | Vector
) -> Matrix:
    """Gradient w.r.t. the batch given gradients on the fitted mean and cov (or std)."""
    z = np.asarray(z_batch, dtype=np.float64)
    n = z.shape[0]
    centered = z - est.mean
    grad = np.broadcast_to(np.asarray(grad_mean) / n, z.shape).copy()
    if est.kind is GaussianKind.FULL:
        g = np.asarray(grad_second, dtype=np.float64)
        grad += centered @ (g + g.T) / n
    else:
        assert est.diag_std is not None
        std = est.diag_std
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(std > 0, np.asarray(grad_second) / std, 0.0)
        grad += centered * scale / n
    return grad


def w2_md_loss(est: GaussianEstimate) -> float:
    """Squared 2-Wasserstein distance ||mu||^2 + tr(Sigma + I - 2 Sigma^{1/2})."""
    _require(est, GaussianKind.FULL)
    assert est.cov is not None
    root = sqrt_psd(est.cov)
    return float(est.mean @ est.mean + np.trace(est.cov) + est.dim - 2.0 * np.trace(root))


def w2_md_loss_grad(est: GaussianEstimate) -> tuple[Vector, Matrix]:
    _require(est, GaussianKind.FULL)
    assert est.cov is not None
    eye = np.eye(est.dim)
    return 2.0 * est.mean, eye - 2.0 * sqrt_psd_backward(est.cov, eye)


def w2_1d_loss(est: GaussianEstimate) -> float:
    """Sum over dimensions of mu_m^2 + (sigma_m - 1)^2."""
    _require(est, GaussianKind.DIAGONAL)
    assert est.diag_std is not None
    return float(np.sum(est.mean**2) + np.sum((est.diag_std - 1.0) ** 2))


def w2_1d_loss_grad(est: GaussianEstimate) -> tuple[Vector, Vector]:
    _require(est, GaussianKind.DIAGONAL)
    assert est.diag_std is not None
    return 2.0 * est.mean, 2.0 * (est.diag_std - 1.0)


def _pnorm(v: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


def _pnorm_grad(v: np.ndarray, p: float) -> np.ndarray:
    norm = _pnorm(v, p)
    if norm == 0.0:
        return np.zeros_like(v)
    if p == 1.0:
        return np.sign(v)
    return np.sign(v) * np.abs(v) ** (p - 1.0) / norm ** (p - 1.0)


def _check_p(p: float) -> None:
    if not (np.isfinite(p) and p >= 1.0):
        raise LossError(f"p must be a finite real >= 1, got {p}")


def pnorm_loss(est: GaussianEstimate, p: float = 2.0) -> float:
    """||mu||_p + ||Sigma - I||_p, the matrix norm taken entrywise."""
    _check_p(p)
    _require(est, GaussianKind.FULL)
    assert est.cov is not None
    return _pnorm(est.mean, p) + _pnorm(est.cov - np.eye(est.dim), p)


def pnorm_loss_grad(est: GaussianEstimate, p: float = 2.0) -> tuple[Vector, Matrix]:
    _check_p(p)
    _require(est, GaussianKind.FULL)
    assert est.cov is not None
    return _pnorm_grad(est.mean, p), _pnorm_grad(est.cov - np.eye(est.dim), p)


def _kl_inverse(est: GaussianEstimate) -> tuple[Vector, Matrix]:
    """Eigenvalues and inverse of the (ridge-regularised if needed) covariance."""
    assert est.cov is not None
    w, Q = jacobi_eigh(est.cov)
    if w[0] <= KL_MIN_EIGEN:
        w, Q = jacobi_eigh(est.cov + KL_RIDGE * np.eye(est.dim))
        if w[0] <= 0.0:
            raise SingularCovarianceError(
                f"covariance stays singular after a {KL_RIDGE} ridge (min eigenvalue {w[0]:.3e})"
            )
    return w, (Q / w) @ Q.T


def kl_loss(est: GaussianEstimate) -> float:
    """KL(N(0, I) || N(mu, Sigma)) = 1/2 {log det Sigma - M + tr(Sigma^-1) + mu^T Sigma^-1 mu}."""
    _require(est, GaussianKind.FULL)
    w, inv = _kl_inverse(est)
    mu = est.mean
    return float(0.5 * (np.sum(np.log(w)) - est.dim + np.trace(inv) + mu @ inv @ mu))


def kl_loss_grad(est: GaussianEstimate) -> tuple[Vector, Matrix]:
    _require(est, GaussianKind.FULL)
    _, inv = _kl_inverse(est)
    a = inv @ est.mean
    return a, 0.5 * (inv - inv @ inv - np.outer(a, a))
