"""
Delete-block jackknife
----------------------

The sample is shuffled once (seeded) and cut into ``m`` disjoint blocks.
Subsample ``i`` is the data without block ``i``, so every observation is
left out exactly once. The spread of the ``m`` re-estimates gives

    sigma_hat = sqrt((1 - 1/m) * sum_i (est_i - mean(est))**2)
    a95       = z_0.975 * sigma_hat

and the 95% range is centred on the full-sample estimate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import special

from .exceptions import InputError

logger = logging.getLogger(__name__)

__all__ = ["JackknifeResult", "jackknife", "block_partition"]

Z975 = float(special.ndtri(0.975))


@dataclass(frozen=True)
class JackknifeResult:
    """Jackknife summary for one estimated coordinate."""

    name: str
    full_estimate: float
    estimates: np.ndarray
    pooled_mean: float
    sigma_hat: float
    a95: float
    cr95: tuple
    failed_blocks: tuple = ()
    warnings: tuple = field(default=())

    @property
    def m(self) -> int:
        return int(self.estimates.size)

    @property
    def rel_half_width(self) -> float:
        """``a95 / |full_estimate|``."""
        return self.a95 / abs(self.full_estimate) if self.full_estimate != 0 else math.inf

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "full_estimate": self.full_estimate,
            "estimates": self.estimates.tolist(),
            "pooled_mean": self.pooled_mean,
            "sigma_hat": self.sigma_hat,
            "a95": self.a95,
            "cr95": list(self.cr95),
            "rel_half_width": self.rel_half_width,
            "failed_blocks": list(self.failed_blocks),
            "warnings": list(self.warnings),
        }


def block_partition(n: int, m: int, seed) -> list[np.ndarray]:
    """Random partition of ``range(n)`` into ``m`` blocks whose sizes differ by at most one."""
    if m < 2:
        raise InputError("the jackknife needs at least two blocks")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(b) for b in np.array_split(perm, m)]


def summarize(estimates, full_estimate: float, name: str = "estimate") -> JackknifeResult:
    """Pool per-subsample estimates into a :class:`JackknifeResult`."""
    est = np.asarray(estimates, dtype=float)
    m = est.size
    if m < 2:
        raise InputError("at least two subsample estimates are required")
    mean = float(np.mean(est))
    sigma = math.sqrt((1.0 - 1.0 / m) * float(np.sum((est - mean) ** 2)))
    a95 = Z975 * sigma
    return JackknifeResult(name=name, full_estimate=float(full_estimate), estimates=est,
                           pooled_mean=mean, sigma_hat=sigma, a95=a95,
                           cr95=(full_estimate - a95, full_estimate + a95))


def _safe_call(estimator, x):
    try:
        return np.atleast_1d(np.asarray(estimator(x), dtype=float)), None
    except Exception as exc:  # noqa: BLE001  failures are reported per block
        return None, f"{type(exc).__name__}: {exc}"


def jackknife(data, estimator: Callable, m: int = 10, seed=0,
              names: Sequence[str] | None = None, n_jobs: int = 1,
              full_estimate=None) -> list[JackknifeResult]:
    """Delete-block jackknife of a vector-valued estimator.

    Parameters
    ----------
    data : array_like
        One-dimensional sample.
    estimator : callable
        Maps a sample to a real vector (or scalar).
    m : int
        Number of blocks; each subsample drops one block.
    seed : int
        Seed of the partition.
    names : sequence of str, optional
        Labels of the estimated coordinates.
    n_jobs : int
        Worker count for the subsample fits. Results are reduced in block
        order, so the output does not depend on it.
    full_estimate : array_like, optional
        Precomputed estimate on the whole sample.

    Returns
    -------
    list of JackknifeResult
        One entry per estimated coordinate. Blocks whose estimator raised
        are excluded and listed in ``failed_blocks``.
    """
    x = np.asarray(data, dtype=float).ravel()
    if m < 2:
        raise InputError("the jackknife needs at least two blocks")
    if x.size < 10 * m:
        raise InputError(f"need at least {10 * m} observations for {m} blocks")

    blocks = block_partition(x.size, m, seed)
    keep = [np.setdiff1d(np.arange(x.size), b, assume_unique=True) for b in blocks]

    if full_estimate is None:
        full = np.atleast_1d(np.asarray(estimator(x), dtype=float))
    else:
        full = np.atleast_1d(np.asarray(full_estimate, dtype=float))

    if n_jobs == 1:
        outs = [_safe_call(estimator, x[k]) for k in keep]
    else:
        outs = Parallel(n_jobs=n_jobs)(delayed(_safe_call)(estimator, x[k]) for k in keep)

    failed = tuple(i for i, (v, _) in enumerate(outs) if v is None)
    msgs = tuple(f"block {i}: {outs[i][1]}" for i in failed)
    for msg in msgs:
        logger.warning("jackknife subsample failed, %s", msg)
    good = np.array([v for v, _ in outs if v is not None])
    if good.shape[0] < 2:
        raise InputError("fewer than two jackknife subsamples produced an estimate")

    labels = list(names) if names is not None else [f"theta{i}" for i in range(full.size)]
    if len(labels) != full.size:
        raise InputError("names must match the estimator's output length")
    results = []
    for j, label in enumerate(labels):
        res = summarize(good[:, j], float(full[j]), label)
        results.append(JackknifeResult(**{**res.__dict__, "failed_blocks": failed, "warnings": msgs}))
    return results
