"""
Value-at-Risk and Expected Shortfall from a GPD tail
----------------------------------------------------

Above the threshold ``u2`` the loss distribution is modelled as
``1 - tail_prob * (1 - G(x - u2))`` with ``G`` a GPD(xi, beta). Quantiles
in that region have the closed form

    VaR(p) = u2 - (beta / xi) * (1 - ((1 - p) / tail_prob) ** (-xi))

and for ``xi < 1`` the expected shortfall is

    ES(p) = VaR(p) / (1 - xi) + (beta - xi * u2) / (1 - xi).

``es_numeric`` averages VaR over an equally spaced grid of levels in
``[p, 1)``, and ``es_empirical`` applies the same grid to the order
statistics of the data. All results are in currency; divide by
``TailModel.sample_mean`` for mean multiples.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .distcore import XI_ZERO, GpdParams
from .estimators import EmpiricalDist, empirical_quantile
from .exceptions import DomainError, InputError

logger = logging.getLogger(__name__)

__all__ = [
    "TailModel",
    "tail_model_from_fit",
    "var_gpd",
    "var_gpd_asymptotic",
    "es_analytic",
    "es_analytic_asymptotic",
    "es_numeric",
    "es_empirical",
    "level_grid",
]

# slack when checking that p lies in the tail region
P_TOL = 1e-12


@dataclass(frozen=True)
class TailModel:
    """GPD tail, probability mass above ``u2`` and the sample mean."""

    gpd: GpdParams
    tail_prob: float
    sample_mean: float = math.nan

    def __post_init__(self):
        if not 0 < self.tail_prob < 1:
            raise DomainError("tail_prob must lie in (0, 1)")

    @property
    def u2(self) -> float:
        return self.gpd.u

    @property
    def p_min(self) -> float:
        """Smallest level whose quantile lies in the GPD region."""
        return 1.0 - self.tail_prob

    def multiple(self, value: float) -> float:
        if not self.sample_mean > 0:
            raise DomainError("mean multiples need a positive sample mean")
        return value / self.sample_mean


def tail_model_from_fit(data, params) -> TailModel:
    """Tail model of a fitted hybrid with the empirical exceedance rate ``N_u2 / n``."""
    x = np.asarray(data, dtype=float)
    n_above = int(np.count_nonzero(x > params.u2))
    if n_above == 0:
        raise InputError("no observation lies above the fitted threshold")
    return TailModel(gpd=GpdParams(xi=params.xi, beta=params.beta, u=params.u2),
                     tail_prob=n_above / x.size, sample_mean=float(np.mean(x)))


def _check_level(p, tm: TailModel) -> np.ndarray:
    pa = np.asarray(p, dtype=float)
    if np.any(~(pa < 1)) or np.any(pa < tm.p_min - P_TOL):
        raise DomainError(
            f"level must lie in [{tm.p_min:.6g}, 1) to fall in the GPD region; "
            "use empirical quantiles below it"
        )
    return pa


def _ratio(pa, tm):
    # (1 - p) / tail_prob, capped at 1 so that p = 1 - tail_prob maps to u2 exactly
    return np.minimum((1.0 - pa) / tm.tail_prob, 1.0)


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def var_gpd(p, tm: TailModel):
    """Exact GPD quantile at level ``p``; ``xi = 0`` uses the exponential limit."""
    pa = _check_level(p, tm)
    xi, beta, u2 = tm.gpd.xi, tm.gpd.beta, tm.gpd.u
    r = _ratio(pa, tm)
    if abs(xi) < XI_ZERO:
        return _out(u2 - beta * np.log(r))
    return _out(u2 - (beta / xi) * (-np.expm1(-xi * np.log(r))))


def var_gpd_asymptotic(p, tm: TailModel):
    """High-level approximation ``u2 * ((1 - p) / tail_prob) ** (-xi)``.

    It coincides with :func:`var_gpd` when ``beta = xi * u2``.
    """
    pa = _check_level(p, tm)
    return _out(tm.gpd.u * _ratio(pa, tm) ** (-tm.gpd.xi))


def _check_finite_mean(tm: TailModel):
    if not tm.gpd.xi < 1:
        raise DomainError(f"expected shortfall is infinite for xi >= 1 (xi = {tm.gpd.xi:.4g})")


def es_analytic(p, tm: TailModel):
    """Closed-form expected shortfall of the GPD tail (requires ``xi < 1``)."""
    _check_finite_mean(tm)
    xi, beta, u2 = tm.gpd.xi, tm.gpd.beta, tm.gpd.u
    v = np.asarray(var_gpd(p, tm))
    return _out(v / (1.0 - xi) + (beta - xi * u2) / (1.0 - xi))


def es_analytic_asymptotic(p, tm: TailModel):
    """``VaR(p) / (1 - xi)``; equal to :func:`es_analytic` when ``beta = xi * u2``."""
    _check_finite_mean(tm)
    return _out(np.asarray(var_gpd(p, tm)) / (1.0 - tm.gpd.xi))


def level_grid(p: float, k: int) -> np.ndarray:
    """Levels ``p + (j - 1) * (1 - p) / k`` for ``j = 1..k``."""
    if k < 1:
        raise InputError("k must be at least 1")
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    return p + np.arange(k) * ((1.0 - p) / k)


def es_numeric(p: float, tm: TailModel, k: int = 20000) -> float:
    """Average of the GPD VaR over ``k`` equally spaced levels from ``p`` up.

    Unlike :func:`es_analytic` this is finite for any ``xi``.
    """
    _check_level(p, tm)
    grid = level_grid(p, k)
    ok = (grid > 0) & (grid < 1)
    if not np.all(ok):
        logger.warning("level grid truncated to (0, 1): %d points dropped", int((~ok).sum()))
        grid = grid[ok]
    return float(np.mean(var_gpd(grid, tm)))


def es_empirical(data, p: float, k: int) -> float:
    """Average of ``k`` type-1 empirical quantiles from level ``p`` up."""
    dist = data if isinstance(data, EmpiricalDist) else EmpiricalDist.from_data(data)
    return float(np.mean(empirical_quantile(dist, level_grid(p, k))))
