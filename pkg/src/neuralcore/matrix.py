"""Dense float64 matrix helpers."""

from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.neuralcore.errors import NonFiniteError, ShapeMismatchError

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]


def as_matrix(data: Any, *, cols: int | None = None, name: str = "matrix") -> Matrix:
    """Coerce ``data`` to a finite 2-D float64 array."""
    arr = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if arr.ndim != 2:
        raise ShapeMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if cols is not None and arr.shape[1] != cols:
        raise ShapeMismatchError(f"{name} has {arr.shape[1]} columns, expected {cols}")
    ensure_finite(arr, name)
    return arr


def ensure_finite(arr: NDArray[Any], what: str) -> None:
    """Raise NonFiniteError if ``arr`` holds any NaN or Inf."""
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite values in {what}", what=what)
