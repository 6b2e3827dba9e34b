"""
Component and hybrid distributions
----------------------------------

Closed-form densities, distribution functions, quantiles and inverse-CDF
samplers for

- the generalized Pareto distribution (GPD),
- the three-component lognormal / exponential bridge / GPD model
  (:class:`HybridParams`, four free coordinates ``[mu, sigma, u2, xi]``),
- the two-component lognormal / GPD model (:class:`LnGpdParams`, free
  coordinates ``[mu, sigma, u]``),
- a Gaussian-body variant of the three-component model
  (:class:`GaussHybridParams`, free coordinates ``[m, s, u2, xi]``).

All dependent parameters (junctions, bridge intensity, GPD scale, weights)
are derived from the free coordinates by imposing a continuous density with
a continuous derivative at each junction and unit total mass.

Every parameter object is an immutable value; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, special

from .exceptions import ConstraintError, DomainError

__all__ = [
    "LognormalParams",
    "ExpParams",
    "GpdParams",
    "HybridParams",
    "LnGpdParams",
    "GaussHybridParams",
    "gpd_cdf",
    "gpd_sf",
    "gpd_logsf",
    "gpd_pdf",
    "gpd_logpdf",
    "gpd_ppf",
    "bridge_junction",
    "derive_dependent_params",
    "derive_lngpd_params",
    "derive_gauss_hybrid_params",
    "hybrid_pdf",
    "hybrid_cdf",
    "hybrid_quantile",
    "hybrid_sample",
    "lngpd_pdf",
    "lngpd_cdf",
    "lngpd_quantile",
    "lngpd_sample",
]

# below this |xi| the GPD is evaluated with its exponential limit
XI_ZERO = 1e-10

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# component parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LognormalParams:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConstraintError(f"sigma must be > 0, got {self.sigma}")

    def pdf(self, x):
        return np.exp(_ln_logpdf(np.asarray(x, dtype=float), self.mu, self.sigma))

    def cdf(self, x):
        return _ln_cdf(np.asarray(x, dtype=float), self.mu, self.sigma)


@dataclass(frozen=True)
class ExpParams:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ConstraintError(f"lambda must be > 0, got {self.lam}")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.lam * np.exp(-self.lam * x)


@dataclass(frozen=True)
class GpdParams:
    """GPD with tail index ``xi``, scale ``beta`` and left endpoint ``u``.

    The shape parameter ``alpha = 1/xi`` is derived, never stored.
    """

    xi: float
    beta: float
    u: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ConstraintError(f"beta must be > 0, got {self.beta}")
        if not math.isfinite(self.xi):
            raise ConstraintError(f"xi must be finite, got {self.xi}")

    @property
    def alpha(self) -> float:
        return 1.0 / self.xi


# ---------------------------------------------------------------------------
# GPD
# ---------------------------------------------------------------------------

def _gpd_check(y, p: GpdParams):
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(np.isnan(y)):
        raise DomainError("GPD excesses must be >= 0")
    if p.xi < -XI_ZERO and np.any(y > -p.beta / p.xi):
        raise DomainError("excess beyond the finite upper endpoint -beta/xi")
    return y


def gpd_logsf(y, p: GpdParams):
    """Log survival function ``log(1 - G(y))`` of the excess ``y``."""
    y = _gpd_check(y, p)
    if abs(p.xi) < XI_ZERO:
        return -y / p.beta
    with np.errstate(divide="ignore"):
        return -np.log1p(p.xi * y / p.beta) / p.xi


def gpd_sf(y, p: GpdParams):
    return np.exp(gpd_logsf(y, p))


def gpd_cdf(y, p: GpdParams):
    """GPD distribution function of the excess ``y >= 0``.

    Uses ``-expm1(logsf)`` so small probabilities keep full precision.
    """
    return -np.expm1(gpd_logsf(y, p))


def gpd_logpdf(y, p: GpdParams):
    y = _gpd_check(y, p)
    if abs(p.xi) < XI_ZERO:
        return -math.log(p.beta) - y / p.beta
    with np.errstate(divide="ignore"):
        return -math.log(p.beta) - (1.0 / p.xi + 1.0) * np.log1p(p.xi * y / p.beta)


def gpd_pdf(y, p: GpdParams):
    return np.exp(gpd_logpdf(y, p))


def gpd_ppf(q, p: GpdParams):
    q = np.asarray(q, dtype=float)
    if np.any((q < 0) | (q >= 1)):
        raise DomainError("GPD quantile level must lie in [0, 1)")
    if abs(p.xi) < XI_ZERO:
        return -p.beta * np.log1p(-q)
    return p.beta / p.xi * np.expm1(-p.xi * np.log1p(-q))


# ---------------------------------------------------------------------------
# lognormal / Gaussian helpers (vectorized, no validation)
# ---------------------------------------------------------------------------

def _ln_logpdf(x, mu, sigma):
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.log(x)
        z = (lx - mu) / sigma
        return -lx - math.log(sigma) - _LOG_SQRT_2PI - 0.5 * z * z


def _ln_cdf(x, mu, sigma):
    with np.errstate(divide="ignore"):
        return special.ndtr((np.log(x) - mu) / sigma)


def _ln_sf(x, mu, sigma):
    with np.errstate(divide="ignore"):
        return special.ndtr(-(np.log(x) - mu) / sigma)


def _norm_logpdf(x, m, s):
    z = (x - m) / s
    return -math.log(s) - _LOG_SQRT_2PI - 0.5 * z * z


def _positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("hybrid models are defined for x > 0 only")
    return x


def _unit_interval(q):
    q = np.asarray(q, dtype=float)
    if np.any(~((q > 0) & (q < 1))):
        raise DomainError("quantile level must lie in (0, 1)")
    return q


def _uniforms(n: int, seed) -> np.ndarray:
    if n < 1:
        raise DomainError("sample size must be >= 1")
    rng = np.random.default_rng(seed)
    q = rng.random(n)
    # random() can return exactly 0.0
    return np.maximum(q, np.finfo(float).tiny)


# ---------------------------------------------------------------------------
# three-component models (shared piecewise machinery)
# ---------------------------------------------------------------------------

class _ThreePiece:
    """Piecewise body / exponential bridge / GPD evaluation.

    Subclasses supply ``_body_logpdf``, ``_body_cdf``, ``_body_sf`` and
    ``_body_ppf`` for their body component.
    """

    u1: float
    u2: float
    lam: float
    xi: float
    beta: float
    gamma1: float
    gamma2: float
    gamma3: float

    @property
    def alpha(self) -> float:
        return 1.0 / self.xi

    @property
    def collapsed(self) -> bool:
        return self.u1 == self.u2

    @property
    def gpd(self) -> GpdParams:
        return GpdParams(self.xi, self.beta, self.u2)

    def _check_x(self, x):
        return _positive(x)

    def _pieces(self, x):
        return x <= self.u1, (x > self.u1) & (x <= self.u2), x > self.u2

    def logpdf(self, x):
        x = self._check_x(x)
        out = np.empty_like(x)
        body, bridge, tail = self._pieces(x)
        out[body] = math.log(self.gamma1) + self._body_logpdf(x[body])
        out[bridge] = math.log(self.gamma2) + math.log(self.lam) - self.lam * x[bridge]
        out[tail] = math.log(self.gamma3) + gpd_logpdf(x[tail] - self.u2, GpdParams(self.xi, self.beta))
        return out

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        x = self._check_x(x)
        out = np.empty_like(x)
        body, bridge, tail = self._pieces(x)
        out[body] = self.gamma1 * self._body_cdf(x[body])
        out[bridge] = self.cdf_u1 + self.gamma2 * (
            math.exp(-self.lam * self.u1) - np.exp(-self.lam * x[bridge])
        )
        out[tail] = 1.0 - self.gamma3 * gpd_sf(x[tail] - self.u2, GpdParams(self.xi, self.beta))
        return out

    def sf(self, x):
        x = self._check_x(x)
        out = np.empty_like(x)
        body, bridge, tail = self._pieces(x)
        out[body] = (1.0 - self.cdf_u1) + self.gamma1 * (
            self._body_cdf(self.u1) - self._body_cdf(x[body])
        )
        out[bridge] = self.gamma3 + self.gamma2 * (
            np.exp(-self.lam * x[bridge]) - math.exp(-self.lam * self.u2)
        )
        out[tail] = self.gamma3 * gpd_sf(x[tail] - self.u2, GpdParams(self.xi, self.beta))
        return out

    def logsf(self, x):
        """Log survival; exact in the GPD region where ``sf`` underflows."""
        x = self._check_x(x)
        tail = x > self.u2
        out = np.empty_like(x)
        with np.errstate(divide="ignore"):
            out[~tail] = np.log(self.sf(x[~tail]))
        out[tail] = math.log(self.gamma3) + gpd_logsf(x[tail] - self.u2, GpdParams(self.xi, self.beta))
        return out

    @property
    def cdf_u1(self) -> float:
        return float(self.gamma1 * self._body_cdf(np.array(self.u1)))

    @property
    def cdf_u2(self) -> float:
        return 1.0 - self.gamma3

    def ppf(self, q):
        q = _unit_interval(q)
        out = np.empty_like(q)
        h1, h2 = self.cdf_u1, self.cdf_u2
        body = q <= h1
        tail = q > h2
        bridge = ~body & ~tail
        out[body] = self._body_ppf(q[body] / self.gamma1)
        # invert the bridge through the survival form to limit cancellation
        out[bridge] = -np.log(
            math.exp(-self.lam * self.u2) + (1.0 - q[bridge] - self.gamma3) / self.gamma2
        ) / self.lam
        out[tail] = self.u2 + gpd_ppf(
            np.clip(1.0 - (1.0 - q[tail]) / self.gamma3, 0.0, None), GpdParams(self.xi, self.beta)
        )
        return out

    def sample(self, n: int, seed=None) -> np.ndarray:
        """Draw ``n`` i.i.d. values by inverse-CDF of seeded uniforms."""
        return self.ppf(_uniforms(n, seed))

    def total_mass(self) -> float:
        return self.cdf_u1 + self.gamma2 * (
            math.exp(-self.lam * self.u1) - math.exp(-self.lam * self.u2)
        ) + self.gamma3


def _check_weights(*weights):
    for w in weights:
        if not (math.isfinite(w) and w >= 0):
            raise ConstraintError(f"non-finite or negative component weight {w!r}")


@dataclass(frozen=True)
class HybridParams(_ThreePiece):
    """Lognormal body, exponential bridge on ``[u1, u2]`` and GPD tail.

    Build instances with :func:`derive_dependent_params`; the constructor
    does not check the junction relations.
    """

    mu: float
    sigma: float
    u1: float
    u2: float
    lam: float
    xi: float
    beta: float
    gamma1: float
    gamma2: float
    gamma3: float

    free_names = ("mu", "sigma", "u2", "xi")

    @property
    def free(self) -> np.ndarray:
        return np.array([self.mu, self.sigma, self.u2, self.xi])

    @property
    def body(self) -> LognormalParams:
        return LognormalParams(self.mu, self.sigma)

    def _body_logpdf(self, x):
        return _ln_logpdf(x, self.mu, self.sigma)

    def _body_cdf(self, x):
        return _ln_cdf(x, self.mu, self.sigma)

    def _body_ppf(self, p):
        return np.exp(self.mu + self.sigma * special.ndtri(p))


@dataclass(frozen=True)
class GaussHybridParams(_ThreePiece):
    """Gaussian body (mean ``m``, std ``s``), exponential bridge, GPD tail.

    The body lives on the whole real line, so part of the mass may sit
    below zero; densities are still only evaluated at positive ``x``.
    """

    m: float
    s: float
    u1: float
    u2: float
    lam: float
    xi: float
    beta: float
    gamma1: float
    gamma2: float
    gamma3: float

    free_names = ("m", "s", "u2", "xi")

    @property
    def free(self) -> np.ndarray:
        return np.array([self.m, self.s, self.u2, self.xi])

    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)):
            raise DomainError("NaN argument")
        return x

    def _body_logpdf(self, x):
        return _norm_logpdf(x, self.m, self.s)

    def _body_cdf(self, x):
        return special.ndtr((x - self.m) / self.s)

    def _body_ppf(self, p):
        return self.m + self.s * special.ndtri(p)


# ---------------------------------------------------------------------------
# junction relations
# ---------------------------------------------------------------------------

def bridge_junction(lam: float, mu: float, sigma: float, u2: float) -> float:
    """Lower junction ``u1`` solving ``lam*sigma^2*u1 - log(u1) = sigma^2 - mu``.

    The left side is convex in ``u1`` with its minimum at ``1/(lam*sigma^2)``.
    The junction is the root on the increasing branch (where the lognormal
    log-derivative climbs back to ``-lam``). When that root lies above
    ``u2``, or no root exists, the bridge collapses and ``u2`` is returned.
    """
    a = lam * sigma * sigma
    c = sigma * sigma - mu
    vertex = 1.0 / a

    def phi(u):
        return a * u - math.log(u) - c

    if u2 <= vertex or phi(u2) < 0.0 or phi(vertex) > 0.0:
        return u2
    if phi(u2) == 0.0:
        return u2
    if phi(vertex) == 0.0:
        return vertex
    root = optimize.brentq(phi, vertex, u2, xtol=1e-13 * u2, rtol=4 * np.finfo(float).eps)
    return min(root, u2)


def _as_free(free: Sequence[float], size: int) -> list[float]:
    values = [float(v) for v in free]
    if len(values) != size:
        raise ConstraintError(f"expected {size} free parameters, got {len(values)}")
    if not all(math.isfinite(v) for v in values):
        raise ConstraintError(f"non-finite free parameter in {values}")
    return values


def derive_dependent_params(free: Sequence[float]) -> HybridParams:
    """Complete the free vector ``[mu, sigma, u2, xi]`` into a HybridParams.

    Parameters
    ----------
    free : sequence of 4 floats
        Lognormal location and scale, tail threshold and tail index.

    Returns
    -------
    HybridParams
        With ``beta = xi*u2``, ``lam = (1+xi)/beta``, ``u1`` from
        :func:`bridge_junction` and the three weights that give a C1
        density of unit mass.

    Raises
    ------
    ConstraintError
        If the free vector is outside ``sigma > 0, u2 > 0, xi > 0`` or the
        weights cannot be represented in floating point.
    """
    mu, sigma, u2, xi = _as_free(free, 4)
    if not (sigma > 0 and u2 > 0 and xi > 0):
        raise ConstraintError(f"need sigma, u2, xi > 0; got {sigma}, {u2}, {xi}")
    beta = xi * u2
    lam = (1.0 + xi) / beta
    u1 = bridge_junction(lam, mu, sigma, u2)

    f1 = math.exp(float(_ln_logpdf(u1, mu, sigma)))
    F1 = float(_ln_cdf(u1, mu, sigma))
    # gamma_i written over the common denominator D scaled by exp(lam*u1);
    # avoids dividing by a vanishing body density at u1
    decay = math.exp(-lam * (u2 - u1))
    denom = f1 * xi * decay + f1 + lam * F1
    if not (denom > 0 and math.isfinite(denom)):
        raise ConstraintError("degenerate weight normalization")
    try:
        gamma1 = lam / denom
        gamma2 = f1 * math.exp(lam * u1) / denom
    except OverflowError as exc:
        raise ConstraintError("weight overflow") from exc
    gamma3 = (1.0 + xi) * f1 * decay / denom
    _check_weights(gamma1, gamma2, gamma3)
    if gamma1 == 0 or gamma2 == 0 or gamma3 == 0:
        raise ConstraintError("component weight underflowed to zero")
    return HybridParams(mu, sigma, u1, u2, lam, xi, beta, gamma1, gamma2, gamma3)


def derive_gauss_hybrid_params(free: Sequence[float]) -> GaussHybridParams:
    """Gaussian-body analogue of :func:`derive_dependent_params`.

    The lower junction solves ``(u1 - m)/s^2 = lam``, i.e.
    ``u1 = m + lam*s^2``; it collapses onto ``u2`` when it would exceed it.
    """
    m, s, u2, xi = _as_free(free, 4)
    if not (s > 0 and u2 > 0 and xi > 0):
        raise ConstraintError(f"need s, u2, xi > 0; got {s}, {u2}, {xi}")
    beta = xi * u2
    lam = (1.0 + xi) / beta
    u1 = min(m + lam * s * s, u2)

    z1 = (u1 - m) / s
    f1 = math.exp(float(_norm_logpdf(u1, m, s)))
    F1 = float(special.ndtr(z1))
    decay = math.exp(-lam * (u2 - u1))
    denom = f1 * xi * decay + f1 + lam * F1
    if not (denom > 0 and math.isfinite(denom)):
        raise ConstraintError("degenerate weight normalization")
    try:
        gamma1 = lam / denom
        gamma2 = f1 * math.exp(lam * u1) / denom
    except OverflowError as exc:
        raise ConstraintError("weight overflow") from exc
    gamma3 = (1.0 + xi) * f1 * decay / denom
    _check_weights(gamma1, gamma2, gamma3)
    if gamma1 == 0 or gamma2 == 0 or gamma3 == 0:
        raise ConstraintError("component weight underflowed to zero")
    return GaussHybridParams(m, s, u1, u2, lam, xi, beta, gamma1, gamma2, gamma3)


# ---------------------------------------------------------------------------
# two-component lognormal / GPD
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LnGpdParams:
    """Lognormal body below ``u`` glued to a GPD tail above it.

    ``gt1`` and ``gt2`` are the body and tail weights.
    """

    mu: float
    sigma: float
    u: float
    xi: float
    beta: float
    gt1: float
    gt2: float

    free_names = ("mu", "sigma", "u")

    @property
    def free(self) -> np.ndarray:
        return np.array([self.mu, self.sigma, self.u])

    @property
    def u1(self) -> float:
        return self.u

    @property
    def u2(self) -> float:
        return self.u

    @property
    def alpha(self) -> float:
        return 1.0 / self.xi

    @property
    def collapsed(self) -> bool:
        return True

    @property
    def gpd(self) -> GpdParams:
        return GpdParams(self.xi, self.beta, self.u)

    @property
    def cdf_u2(self) -> float:
        return 1.0 - self.gt2

    def total_mass(self) -> float:
        return self.gt1 * float(_ln_cdf(self.u, self.mu, self.sigma)) + self.gt2

    def logpdf(self, x):
        x = _positive(x)
        out = np.empty_like(x)
        body = x <= self.u
        out[body] = math.log(self.gt1) + _ln_logpdf(x[body], self.mu, self.sigma)
        out[~body] = math.log(self.gt2) + gpd_logpdf(x[~body] - self.u, GpdParams(self.xi, self.beta))
        return out

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        x = _positive(x)
        out = np.empty_like(x)
        body = x <= self.u
        out[body] = self.gt1 * _ln_cdf(x[body], self.mu, self.sigma)
        out[~body] = 1.0 - self.gt2 * gpd_sf(x[~body] - self.u, GpdParams(self.xi, self.beta))
        return out

    def sf(self, x):
        x = _positive(x)
        out = np.empty_like(x)
        body = x <= self.u
        out[body] = self.gt2 + self.gt1 * (
            _ln_cdf(self.u, self.mu, self.sigma) - _ln_cdf(x[body], self.mu, self.sigma)
        )
        out[~body] = self.gt2 * gpd_sf(x[~body] - self.u, GpdParams(self.xi, self.beta))
        return out

    def logsf(self, x):
        x = _positive(x)
        tail = x > self.u
        out = np.empty_like(x)
        with np.errstate(divide="ignore"):
            out[~tail] = np.log(self.sf(x[~tail]))
        out[tail] = math.log(self.gt2) + gpd_logsf(x[tail] - self.u, GpdParams(self.xi, self.beta))
        return out

    def ppf(self, q):
        q = _unit_interval(q)
        out = np.empty_like(q)
        body = q <= 1.0 - self.gt2
        out[body] = np.exp(self.mu + self.sigma * special.ndtri(q[body] / self.gt1))
        out[~body] = self.u + gpd_ppf(
            np.clip(1.0 - (1.0 - q[~body]) / self.gt2, 0.0, None), GpdParams(self.xi, self.beta)
        )
        return out

    def sample(self, n: int, seed=None) -> np.ndarray:
        return self.ppf(_uniforms(n, seed))


def derive_lngpd_params(free: Sequence[float]) -> LnGpdParams:
    """Complete ``[mu, sigma, u]`` into an LnGpdParams.

    ``xi = sigma^2/(log u - mu)``, ``beta = xi*u``; raises ConstraintError
    when ``log u <= mu`` (the tail index would not be positive).
    """
    mu, sigma, u = _as_free(free, 3)
    if not (sigma > 0 and u > 0):
        raise ConstraintError(f"need sigma, u > 0; got {sigma}, {u}")
    gap = math.log(u) - mu
    if not gap > 0:
        raise ConstraintError(f"log(u) = {math.log(u):.6g} must exceed mu = {mu:.6g}")
    xi = sigma * sigma / gap
    beta = xi * u
    f = math.exp(float(_ln_logpdf(u, mu, sigma)))
    F = float(_ln_cdf(u, mu, sigma))
    denom = beta * f + F
    if not (denom > 0 and math.isfinite(denom)):
        raise ConstraintError("degenerate weight normalization")
    gt1 = 1.0 / denom
    gt2 = beta * f / denom
    _check_weights(gt1, gt2)
    if gt2 == 0:
        raise ConstraintError("tail weight underflowed to zero")
    return LnGpdParams(mu, sigma, u, xi, beta, gt1, gt2)


# ---------------------------------------------------------------------------
# function-style entry points
# ---------------------------------------------------------------------------

def hybrid_pdf(x, p: HybridParams):
    return p.pdf(x)


def hybrid_cdf(x, p: HybridParams):
    return p.cdf(x)


def hybrid_quantile(q, p: HybridParams):
    return p.ppf(q)


def hybrid_sample(p: HybridParams, n: int, seed=None):
    return p.sample(n, seed)


def lngpd_pdf(x, p: LnGpdParams):
    return p.pdf(x)


def lngpd_cdf(x, p: LnGpdParams):
    return p.cdf(x)


def lngpd_quantile(q, p: LnGpdParams):
    return p.ppf(q)


def lngpd_sample(p: LnGpdParams, n: int, seed=None):
    return p.sample(n, seed)
