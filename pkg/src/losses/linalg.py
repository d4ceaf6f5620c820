"""Symmetric eigendecomposition and the PSD square root with its gradient."""

import numpy as np

from src.losses.errors import LossError, NotPositiveSemidefiniteError
from src.neuralcore.matrix import Matrix, Vector

SYMMETRY_TOL = 1e-10
EIGEN_CLAMP_TOL = 1e-10
NEGATIVE_EIGEN_TOL = 1e-6
DEGENERATE_GAP = 1e-8
EIGEN_FLOOR = 1e-12


def relative_tol(S: Matrix, tol: float) -> float:
    """``tol`` scaled by the largest entry of ``S`` when that exceeds 1."""
    return tol * max(1.0, float(np.max(np.abs(S), initial=0.0)))


def check_symmetric(S: Matrix, tol: float = SYMMETRY_TOL) -> Matrix:
    """Return the symmetrised copy of a square matrix, or raise if it is asymmetric."""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise LossError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise LossError("matrix has non-finite entries")
    if np.max(np.abs(S - S.T), initial=0.0) > tol:
        raise LossError(f"matrix is not symmetric within {tol}")
    return 0.5 * (S + S.T)


def jacobi_eigh(S: Matrix, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[Vector, Matrix]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns, so that S = Q diag(w) Q^T.
    """
    A = np.array(S, dtype=np.float64)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(float(np.linalg.norm(A)), np.finfo(np.float64).tiny)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(A, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0

                vec_p, vec_q = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q

    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def psd_eigh(S: Matrix) -> tuple[Vector, Matrix]:
    """Eigendecomposition of a PSD matrix with tiny negative eigenvalues clamped to 0."""
    S = check_symmetric(S)
    w, Q = jacobi_eigh(S)
    if w.size and w[0] < -relative_tol(S, NEGATIVE_EIGEN_TOL):
        raise NotPositiveSemidefiniteError(f"smallest eigenvalue {w[0]:.3e} is negative")
    return np.maximum(w, 0.0), Q


def sqrt_psd(S: Matrix) -> Matrix:
    """Symmetric R with R @ R = S."""
    w, Q = psd_eigh(S)
    R = (Q * np.sqrt(w)) @ Q.T
    return 0.5 * (R + R.T)


def sqrt_psd_backward(S: Matrix, grad_R: Matrix) -> Matrix:
    """Pull a gradient on S^{1/2} back to S (Daleckii-Krein divided differences)."""
    w, Q = psd_eigh(S)
    w = np.maximum(w, EIGEN_FLOOR)
    r = np.sqrt(w)

    gap = w[:, None] - w[None, :]
    degenerate = np.abs(gap) < DEGENERATE_GAP
    limit = 1.0 / (2.0 * np.sqrt(0.5 * (w[:, None] + w[None, :])))
    with np.errstate(divide="ignore", invalid="ignore"):
        divided = (r[:, None] - r[None, :]) / gap
    K = np.where(degenerate, limit, divided)

    G = 0.5 * (grad_R + grad_R.T)
    return Q @ (K * (Q.T @ G @ Q)) @ Q.T
