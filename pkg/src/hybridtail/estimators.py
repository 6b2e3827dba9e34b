"""
Classical estimators on raw loss data
-------------------------------------

Empirical distribution and type-1 quantiles, the Hill tail-index estimator
with its asymptotic confidence interval, descriptive moments, and the
monthly frequency-series transforms used to inspect claim counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import DomainError, InputError

__all__ = [
    "EmpiricalDist",
    "HillResult",
    "DescStats",
    "FrequencySeries",
    "empirical_quantile",
    "hill_estimate",
    "descriptive_stats",
    "normalized_monthly_deviation",
    "moving_average",
]

Z975 = float(special.ndtri(0.975))


def _type1_index(q: float, n: int) -> int:
    """1-based order-statistic index ``ceil(q * n)``.

    ``q * n`` is rounded to 9 decimals first so that products such as
    ``0.966 * 1000`` land on 966 and not on 967.
    """
    return min(n, max(1, math.ceil(round(q * n, 9))))


@dataclass(frozen=True)
class EmpiricalDist:
    """Sorted sample with its right-continuous empirical CDF."""

    sorted_data: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.sorted_data, dtype=float)
        if x.ndim != 1 or x.size < 1:
            raise InputError("an empirical distribution needs at least one value")
        if not np.all(np.isfinite(x)):
            raise InputError("empirical data must be finite")
        if np.any(np.diff(x) < 0):
            x = np.sort(x)
        x.setflags(write=False)
        object.__setattr__(self, "sorted_data", x)

    @classmethod
    def from_data(cls, data) -> "EmpiricalDist":
        return cls(np.sort(np.asarray(data, dtype=float).ravel()))

    @property
    def n(self) -> int:
        return int(self.sorted_data.size)

    def cdf(self, x):
        """F_n(x) = #{x_i <= x} / n."""
        return np.searchsorted(self.sorted_data, x, side="right") / self.n

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def quantile(self, q):
        return empirical_quantile(self, q)


def empirical_quantile(dist: EmpiricalDist, q):
    """Type-1 quantile: the order statistic at index ``ceil(q * n)``.

    Parameters
    ----------
    dist : EmpiricalDist
    q : float or array_like
        Probabilities in the open interval (0, 1).
    """
    qa = np.asarray(q, dtype=float)
    if np.any(~((qa > 0) & (qa < 1))):
        raise DomainError("quantile level must lie in (0, 1)")
    n = dist.n
    idx = np.vectorize(lambda v: _type1_index(float(v), n), otypes=[int])(qa)
    out = dist.sorted_data[idx - 1]
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class HillResult:
    """Hill estimate above an order-statistic threshold.

    ``degenerate`` is set when all exceedances share one value, in which
    case the estimate is 0 and the interval collapses onto it.
    """

    xi_hat: float
    k: int
    u2: float
    ci95: tuple
    degenerate: bool = False

    @property
    def alpha_hat(self) -> float:
        return math.inf if self.xi_hat == 0 else 1.0 / self.xi_hat


def hill_estimate(dist: EmpiricalDist, u2: float | None = None, k: int | None = None) -> HillResult:
    """Hill estimator of the tail index.

    The threshold is snapped down to the largest order statistic not above
    ``u2`` and ``k`` counts the points strictly above it. Alternatively pass
    ``k`` directly, in which case the threshold is ``X_(n-k)``.

    Returns
    -------
    HillResult
        with ``ci95 = xi_hat * (1 -/+ z_0.975 / sqrt(k))``, the asymptotic
        normal interval implied by ``sqrt(k)(H - xi) -> N(0, xi^2)``.
    """
    x = dist.sorted_data
    n = dist.n
    if (u2 is None) == (k is None):
        raise InputError("give exactly one of u2 or k")
    if k is not None:
        if not 1 <= k < n:
            raise InputError(f"k must lie in [1, {n - 1}]")
        thr = float(x[n - k - 1])
        upper = x[n - k:]
    else:
        pos = int(np.searchsorted(x, u2, side="right"))
        if pos == 0:
            raise InputError("threshold lies below the smallest observation")
        thr = float(x[pos - 1])
        upper = x[pos:]
        k = int(upper.size)
        if k == 0:
            raise InputError("no observation lies strictly above the threshold")
    if thr <= 0:
        raise DomainError("Hill estimator needs a positive threshold")
    xi = float(np.mean(np.log(upper / thr)))
    degenerate = bool(upper[0] == upper[-1] == thr) or xi == 0.0
    half = Z975 / math.sqrt(k)
    return HillResult(xi_hat=xi, k=int(k), u2=thr,
                      ci95=(xi * (1 - half), xi * (1 + half)), degenerate=degenerate)


@dataclass(frozen=True)
class DescStats:
    """Sample moments; NaN marks an undefined statistic."""

    n: int
    max: float
    mean: float
    median: float
    std: float
    di: float
    skewness: float
    kurtosis: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def descriptive_stats(data) -> DescStats:
    """Max, mean, median, sample std (ddof=1), dispersion index std/mean,
    standardized third moment and non-excess fourth moment.

    Skewness and kurtosis use the biased central moments scaled by the
    biased variance, so a normal sample gives kurtosis near 3.
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise InputError("descriptive statistics need at least two values")
    if not np.all(np.isfinite(x)):
        raise InputError("descriptive statistics need finite values")
    mean = float(np.mean(x))
    std = float(np.std(x, ddof=1))
    d = x - mean
    m2 = float(np.mean(d * d))
    if m2 > 0:
        skew = float(np.mean(d**3)) / m2**1.5
        kurt = float(np.mean(d**4)) / m2**2
    else:
        skew = kurt = math.nan
    di = std / mean if mean != 0 else math.nan
    return DescStats(n=int(x.size), max=float(np.max(x)), mean=mean,
                     median=float(np.median(x)), std=std, di=di,
                     skewness=skew, kurtosis=kurt)


@dataclass(frozen=True)
class FrequencySeries:
    """Event counts per period; ``period_months`` is the period length."""

    counts: np.ndarray
    period_months: int = 1

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float).ravel()
        if c.size < 1 or np.any(c < 0) or not np.all(np.isfinite(c)):
            raise InputError("counts must be a nonempty vector of non-negative numbers")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def k_t(self) -> int:
        return int(self.counts.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.counts))


def normalized_monthly_deviation(series: FrequencySeries) -> np.ndarray:
    """Relative deviation ``(m_i - mean) / mean`` of each period count.

    An all-zero series has no defined deviation and yields NaNs.
    """
    m = series.mean
    if m == 0:
        return np.full(series.k_t, math.nan)
    return (series.counts - m) / m


def moving_average(series: FrequencySeries, window: int) -> np.ndarray:
    """Trailing-window mean; returns ``K - window + 1`` values."""
    if not 1 <= window <= series.k_t:
        raise InputError(f"window must lie in [1, {series.k_t}]")
    c = np.concatenate([[0.0], np.cumsum(series.counts)])
    return (c[window:] - c[:-window]) / window
