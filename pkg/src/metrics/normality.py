"""Normal CDF/quantile and the per-dimension normality statistics."""

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from scipy import stats
from scipy.special import ndtr, ndtri

from src.metrics.errors import StatisticsError

SW_MIN_N = 3
SW_MAX_N = 5000

# Royston's polynomial corrections for the two extreme weights.
_SW_C1 = np.array([-2.706056, 4.434685, -2.07119, -0.147981, 0.221157, 0.0])
_SW_C2 = np.array([-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0])


def normal_cdf(x: ArrayLike) -> NDArray[np.float64] | float:
    return ndtr(x)


def normal_quantile(p: ArrayLike) -> NDArray[np.float64] | float:
    arr = np.asarray(p, dtype=np.float64)
    if np.any((arr <= 0.0) | (arr >= 1.0)) or not np.all(np.isfinite(arr)):
        raise StatisticsError("normal_quantile is defined on the open interval (0, 1)")
    return ndtri(p)


def _vector(samples: ArrayLike, name: str) -> NDArray[np.float64]:
    x = np.asarray(samples, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise StatisticsError(f"{name} input has non-finite values")
    return x


def shapiro_wilk_weights(n: int) -> NDArray[np.float64]:
    """Antisymmetric SW coefficients a_1..a_n for sorted samples (Royston)."""
    if not SW_MIN_N <= n <= SW_MAX_N:
        raise StatisticsError(f"Shapiro-Wilk needs {SW_MIN_N} <= n <= {SW_MAX_N}, got {n}")
    a = np.zeros(n)
    half = n // 2
    if n == 3:
        a[0] = np.sqrt(0.5)
    else:
        m = ndtri((np.arange(half) + 0.625) / (n + 0.25))
        summ2 = 2.0 * np.sum(m**2)
        ssumm2 = np.sqrt(summ2)
        rsn = 1.0 / np.sqrt(n)
        a1 = np.polyval(_SW_C1, rsn) - m[0] / ssumm2
        if n > 5:
            first = 2
            a2 = -m[1] / ssumm2 + np.polyval(_SW_C2, rsn)
            fac = np.sqrt((summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a1**2 - 2 * a2**2))
            a[1] = a2
        else:
            first = 1
            fac = np.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1**2))
        a[0] = a1
        a[first:half] = -m[first:half] / fac
    a[n - half:] = a[half - 1::-1]
    a[:half] *= -1.0
    return a


def shapiro_wilk(samples: ArrayLike) -> float:
    """Shapiro-Wilk W in (0, 1]."""
    x = np.sort(_vector(samples, "Shapiro-Wilk"))
    a = shapiro_wilk_weights(x.size)
    ss = np.sum((x - x.mean()) ** 2)
    if ss <= 0.0:
        raise StatisticsError("Shapiro-Wilk is undefined for zero-variance samples")
    return float(min((a @ x) ** 2 / ss, 1.0))


def ks_statistic(samples: ArrayLike) -> float:
    """One-sample Kolmogorov-Smirnov D against the standard normal."""
    x = _vector(samples, "Kolmogorov-Smirnov")
    if x.size == 0:
        raise StatisticsError("Kolmogorov-Smirnov needs at least one sample")
    return float(stats.kstest(x, "norm", method="asymp").statistic)


def qq_data(samples: ArrayLike) -> pd.DataFrame:
    """Hazen-position normal quantiles paired with the sorted samples."""
    x = np.sort(_vector(samples, "QQ"))
    n = x.size
    if n == 0:
        return pd.DataFrame({"theoretical": [], "sample": []})
    theoretical = ndtri((np.arange(1, n + 1) - 0.5) / n)
    return pd.DataFrame({"theoretical": theoretical, "sample": x})
