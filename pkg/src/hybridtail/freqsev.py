"""
Poisson-GPD frequency-severity model
------------------------------------

Exceedances of a threshold ``u`` arrive as a Poisson process with rate
``lam`` per time unit and have GPD(xi, beta) excesses. The maximum over
one time unit then has distribution

    H_u(x) = exp(-lam * (1 + xi * (x - u) / beta) ** (-1 / xi)),  x > u.

The likelihood factorizes into a Poisson term for the counts and a GPD
term for the magnitudes, so both parts are maximized separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .distcore import XI_ZERO
from .exceptions import ConvergenceError, DomainError, InputError

__all__ = [
    "PoissonGpdParams",
    "PoissonGpdFit",
    "ExceedanceSeries",
    "poisson_gpd_cdf",
    "gpd_loglik",
    "poisson_loglik",
    "fit_gpd_mle",
    "fit_poisson_gpd",
]

Z975 = float(special.ndtri(0.975))
MIN_MAGNITUDES = 30
MIN_PERIODS = 3
XI_MAX = 5.0


@dataclass(frozen=True)
class PoissonGpdParams:
    """Rate per time unit plus the GPD of the excesses over ``u``."""

    lam: float
    xi: float
    beta: float
    u: float
    time_unit: str = "period"

    def __post_init__(self):
        if not (self.lam > 0 and self.beta > 0 and self.xi >= 0):
            raise DomainError("need lam > 0, beta > 0 and xi >= 0")


@dataclass(frozen=True)
class ExceedanceSeries:
    """Magnitudes above the threshold and the number of them in each period.

    ``period_length`` expresses one period in the reporting time unit, so
    that monthly counts can be reported per quarter with 1/3.
    """

    magnitudes: np.ndarray
    period_counts: np.ndarray
    period_length: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.magnitudes, dtype=float).ravel()
        c = np.asarray(self.period_counts).ravel()
        if np.any(c < 0) or not np.all(np.equal(np.mod(c, 1), 0)):
            raise InputError("period counts must be non-negative integers")
        c = c.astype(np.int64)
        if int(c.sum()) != m.size:
            raise InputError("period counts must add up to the number of magnitudes")
        if not self.period_length > 0:
            raise InputError("period_length must be positive")
        object.__setattr__(self, "magnitudes", m)
        object.__setattr__(self, "period_counts", c)

    @property
    def n_periods(self) -> int:
        return int(self.period_counts.size)

    @property
    def exposure(self) -> float:
        return self.n_periods * self.period_length


def poisson_gpd_cdf(x, p: PoissonGpdParams):
    """Distribution of the largest loss per time unit, valid for ``x >= u``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < p.u) or np.any(np.isnan(xa)):
        raise DomainError("the Poisson-GPD distribution is defined above the threshold only")
    y = (xa - p.u) / p.beta
    if abs(p.xi) < XI_ZERO:
        log_tail = -y
    else:
        log_tail = -np.log1p(p.xi * y) / p.xi
    out = np.exp(-p.lam * np.exp(log_tail))
    return float(out) if out.ndim == 0 else out


def gpd_loglik(xi: float, beta: float, excess) -> float:
    """GPD log-likelihood of non-negative excesses; ``-inf`` outside the support."""
    y = np.asarray(excess, dtype=float)
    if beta <= 0:
        return -math.inf
    z = y / beta
    if abs(xi) < XI_ZERO:
        return float(-y.size * math.log(beta) - z.sum())
    t = 1.0 + xi * z
    if np.any(t <= 0):
        return -math.inf
    return float(-y.size * math.log(beta) - (1.0 + 1.0 / xi) * np.log1p(xi * z).sum())


def poisson_loglik(lam: float, counts, period_length: float = 1.0) -> float:
    """Poisson log-likelihood of the period counts at rate ``lam`` per time unit."""
    c = np.asarray(counts, dtype=float)
    mu = lam * period_length
    if mu <= 0:
        return -math.inf
    return float(np.sum(c * math.log(mu) - mu - special.gammaln(c + 1)))


def _negloglik_and_grad(theta, y):
    """Negative GPD log-likelihood in (xi, log beta) with its gradient."""
    xi, lb = theta
    beta = math.exp(lb)
    z = y / beta
    n = y.size
    if abs(xi) < XI_ZERO:
        nll = n * lb + z.sum()
        return nll, np.array([-(0.5 * (z * z).sum() - z.sum()), n - z.sum()])
    t = 1.0 + xi * z
    if np.any(t <= 0):
        return math.inf, np.zeros(2)
    lt = np.log(t)
    nll = n * lb + (1.0 + 1.0 / xi) * lt.sum()
    d_xi = -lt.sum() / xi**2 + (1.0 + 1.0 / xi) * (z / t).sum()
    d_lb = n - (1.0 + 1.0 / xi) * (xi * z / t).sum()
    return float(nll), np.array([d_xi, d_lb])


def _observed_information(y, xi, beta):
    """Numerical Hessian of the negative log-likelihood in (xi, beta)."""

    def grad(v):
        # chain rule from (xi, log beta) back to (xi, beta)
        _, g = _negloglik_and_grad(np.array([v[0], math.log(v[1])]), y)
        return np.array([g[0], g[1] / v[1]])

    h = np.array([max(1e-6, 1e-5 * abs(xi)), 1e-5 * beta])
    H = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h[j]
        lo = np.array([xi, beta]) - e
        if lo[0] < 0:
            H[:, j] = (grad(np.array([xi, beta]) + e) - grad(np.array([xi, beta]))) / h[j]
        else:
            H[:, j] = (grad(np.array([xi, beta]) + e) - grad(lo)) / (2 * h[j])
    return 0.5 * (H + H.T)


def fit_gpd_mle(excess, xi0: float | None = None, beta0: float | None = None):
    """Maximum-likelihood GPD fit of excesses with ``0 <= xi <= 5``.

    Returns
    -------
    xi, beta : float
    at_boundary : bool
        True when the estimate sits on ``xi = 0``.
    """
    y = np.asarray(excess, dtype=float).ravel()
    if y.size < 2 or np.any(y < 0) or not np.all(np.isfinite(y)):
        raise InputError("excesses must be finite, non-negative and at least two")
    if np.all(y == y[0]):
        # equal excesses: the likelihood is maximized on the exponential boundary
        return 0.0, float(y[0]) if y[0] > 0 else 1.0, True
    m = float(np.mean(y))
    v = float(np.var(y))
    if xi0 is None or beta0 is None:
        # method of moments when it is defined, otherwise a mild heavy start
        xi0 = min(max(0.5 * (1.0 - m * m / v), 0.1), 0.9) if v > 0 else 0.1
        beta0 = max(m * (1.0 - xi0), 1e-12)

    res = optimize.minimize(
        _negloglik_and_grad, np.array([xi0, math.log(beta0)]), args=(y,), jac=True,
        method="L-BFGS-B", bounds=[(0.0, XI_MAX), (None, None)],
        options={"maxiter": 2000, "ftol": 1e-14, "gtol": 1e-10},
    )
    xi, beta = float(res.x[0]), math.exp(float(res.x[1]))
    if not res.success or not math.isfinite(res.fun):
        raise ConvergenceError(f"GPD likelihood maximization failed: {res.message}",
                               best=(xi, beta))
    return xi, beta, xi <= 1e-8


@dataclass(frozen=True)
class PoissonGpdFit:
    """Fitted parameters with observed-information 95% intervals."""

    params: PoissonGpdParams
    ci95: dict
    std_err: dict
    n_exceedances: int
    loglik: float
    xi_at_boundary: bool = False
    notes: tuple = field(default=())

    def as_dict(self) -> dict:
        p = self.params
        return {
            "lambda": p.lam, "xi": p.xi, "beta": p.beta, "u": p.u, "time_unit": p.time_unit,
            "ci95": {k: list(v) for k, v in self.ci95.items()},
            "std_err": dict(self.std_err),
            "n_exceedances": self.n_exceedances, "loglik": self.loglik,
            "xi_at_boundary": self.xi_at_boundary, "notes": list(self.notes),
        }


def fit_poisson_gpd(series: ExceedanceSeries, u: float, time_unit: str = "period") -> PoissonGpdFit:
    """Factorized maximum likelihood for the Poisson-GPD model.

    The rate estimate is the number of exceedances per unit of exposure;
    ``(xi, beta)`` maximize the GPD likelihood of ``magnitudes - u``.
    Standard errors come from the observed information of each factor.
    """
    mags = series.magnitudes
    if mags.size < MIN_MAGNITUDES:
        raise InputError(f"need at least {MIN_MAGNITUDES} exceedances, got {mags.size}")
    if series.n_periods < MIN_PERIODS:
        raise InputError(f"need at least {MIN_PERIODS} periods, got {series.n_periods}")
    if np.any(mags < u):
        raise InputError("all magnitudes must lie above the threshold")

    lam = mags.size / series.exposure
    se_lam = math.sqrt(lam / series.exposure)

    xi, beta, boundary = fit_gpd_mle(mags - u)
    notes = []
    se_xi = se_beta = math.nan
    if boundary:
        notes.append("xi estimate on the xi = 0 boundary; intervals not reported")
    else:
        info = _observed_information(mags - u, xi, beta)
        try:
            cov = np.linalg.inv(info)
            if np.all(np.diag(cov) > 0):
                se_xi, se_beta = math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])
            else:
                notes.append("observed information not positive definite")
        except np.linalg.LinAlgError:
            notes.append("observed information is singular")

    def ci(v, se):
        return (v - Z975 * se, v + Z975 * se)

    ll = poisson_loglik(lam, series.period_counts, series.period_length) + gpd_loglik(xi, beta, mags - u)
    return PoissonGpdFit(
        params=PoissonGpdParams(lam=lam, xi=xi, beta=beta, u=float(u), time_unit=time_unit),
        ci95={"lambda": ci(lam, se_lam), "xi": ci(xi, se_xi), "beta": ci(beta, se_beta)},
        std_err={"lambda": se_lam, "xi": se_xi, "beta": se_beta},
        n_exceedances=int(mags.size),
        loglik=ll,
        xi_at_boundary=boundary,
        notes=tuple(notes),
    )
