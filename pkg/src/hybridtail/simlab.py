"""
Monte Carlo harness for the calibration algorithms
--------------------------------------------------

Draws samples from a known hybrid model, fits them with the three- or
two-component algorithm and scores the mean estimates against the truth.
Run ``i`` of a scenario uses seed ``base_seed + i`` at every sample size,
and results are aggregated in seed order, so a report depends only on the
scenario.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed

from .calibrate import FitConfig, FitReport, fit_model
from .distcore import derive_dependent_params, derive_lngpd_params
from .exceptions import HybridTailError, InputError

logger = logging.getLogger(__name__)

__all__ = [
    "McScenario",
    "McReport",
    "GENERATOR_ROWS",
    "DESK_SEEDS",
    "FULL_SEEDS",
    "run_mc_study",
    "convergence_curve",
    "write_mc_report",
    "scenario_from_mapping",
]

DESK_SEEDS = 20
FULL_SEEDS = 100
CURVE_SIZES = (1000, 5000, 10000, 20000, 50000)
PARAMS = ("mu", "sigma", "u1", "u2", "xi")

FITTERS = {"three-component": "ln-e-gpd", "two-component": "ln-gpd"}

# generating rows of the reference study: free vectors of each generator
GENERATOR_ROWS = {
    "ln-e-gpd-1/3": ("ln-e-gpd", (1.0, 2.0, 14.59, 1.0 / 3.0)),
    "ln-e-gpd-0.8": ("ln-e-gpd", (0.0, 5.0, 4.38, 0.8)),
    "ln-gpd-1/3": ("ln-gpd", (2.0, 0.5, 15.65)),
    "ln-gpd-0.8": ("ln-gpd", (0.0, 1.0, 3.5)),
}


@dataclass(frozen=True)
class McScenario:
    """One generate-and-fit experiment.

    ``generator`` is ``"ln-e-gpd"`` (free vector ``[mu, sigma, u2, xi]``)
    or ``"ln-gpd"`` (``[mu, sigma, u]``).
    """

    generator: str
    params: tuple
    fitter: str = "three-component"
    sizes: tuple = (10000,)
    n_seeds: int = DESK_SEEDS
    base_seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.generator not in ("ln-e-gpd", "ln-gpd"):
            raise InputError(f"unknown generator {self.generator!r}")
        if self.fitter not in FITTERS:
            raise InputError(f"unknown fitter {self.fitter!r}; choose from {sorted(FITTERS)}")
        if not self.sizes or any(int(n) < 100 for n in self.sizes):
            raise InputError("sizes must be a nonempty list of counts >= 100")
        if self.n_seeds < 1:
            raise InputError("n_seeds must be at least 1")
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if not self.name:
            object.__setattr__(self, "name", f"{self.fitter}:{self.generator}:{self.params}")

    @property
    def truth(self):
        if self.generator == "ln-e-gpd":
            return derive_dependent_params(self.params)
        return derive_lngpd_params(self.params)

    @property
    def model(self) -> str:
        return FITTERS[self.fitter]

    def as_dict(self) -> dict:
        return {"name": self.name, "generator": self.generator, "params": list(self.params),
                "fitter": self.fitter, "sizes": list(self.sizes), "n_seeds": self.n_seeds,
                "base_seed": self.base_seed}


def scenario_from_mapping(d: dict) -> McScenario:
    """Scenario from a config table; ``row`` picks one of :data:`GENERATOR_ROWS`."""
    d = dict(d)
    if "row" in d:
        gen, params = GENERATOR_ROWS[d.pop("row")]
        d.setdefault("generator", gen)
        d.setdefault("params", params)
    return McScenario(**d)


@dataclass
class McReport:
    """Aggregated errors of one scenario.

    ``rows`` holds one record per (size, parameter) with mean, std and
    error of the estimates. The error is relative to the truth, or
    absolute (``error_kind = "abs"``) when the truth is 0.
    ``fits`` keeps every individual outcome, a FitReport or an error text.
    """

    scenario: McScenario
    rows: list
    fits: dict = field(repr=False, default_factory=dict)

    def row(self, size: int, param: str) -> dict:
        for r in self.rows:
            if r["size"] == size and r["param"] == param:
                return r
        raise KeyError((size, param))

    def estimates(self, size: int, param: str) -> np.ndarray:
        vals = [_param_value(f.params, param) for f in self.fits[size] if isinstance(f, FitReport)]
        return np.asarray(vals, dtype=float)

    def as_dict(self) -> dict:
        return {"scenario": self.scenario.as_dict(), "rows": self.rows}


def _param_value(params, name: str) -> float:
    if name == "gap":
        return (params.u2 - params.u1) / params.u2
    if name == "alpha":
        return 1.0 / params.xi
    return float(getattr(params, name))


def _one_fit(model: str, truth, n: int, seed: int, cfg: FitConfig):
    try:
        x = truth.sample(n, seed)
        return fit_model(x, model, cfg)
    except (HybridTailError, ValueError, FloatingPointError) as exc:
        return f"{type(exc).__name__}: {exc}"


def _summarize(truth, size, fits) -> list:
    ok = [f for f in fits if isinstance(f, FitReport)]
    rows = []
    for name in PARAMS + ("alpha", "gap"):
        t = _param_value(truth, name)
        vals = np.array([_param_value(f.params, name) for f in ok], dtype=float)
        mean = float(vals.mean()) if vals.size else math.nan
        std = float(vals.std(ddof=1)) if vals.size > 1 else math.nan
        if t == 0:
            err, kind = mean - t, "abs"
            med = float(np.median(np.abs(vals - t))) if vals.size else math.nan
        else:
            err, kind = (mean - t) / t, "rel"
            med = float(np.median(np.abs(vals - t) / abs(t))) if vals.size else math.nan
        row = {"size": size, "param": name, "truth": t, "mean": mean, "std": std,
               "error": err, "error_kind": kind, "median_abs_error": med,
               "n_ok": len(ok), "n_failed": len(fits) - len(ok),
               "n_not_converged": sum(not f.converged for f in ok)}
        if name in ("u1", "u2"):
            # probability levels of the thresholds under the generating model
            row["truth_level"] = float(truth.cdf(t))
            row["mean_level"] = float(truth.cdf(mean)) if math.isfinite(mean) else math.nan
        rows.append(row)
    return rows


def run_mc_study(sc: McScenario, cfg: FitConfig | None = None, n_jobs: int = 1) -> McReport:
    """Fit ``n_seeds`` samples at every size of the scenario.

    Failed fits are kept as error strings in ``fits`` and left out of
    the means; their number is reported per row.
    """
    cfg = cfg or FitConfig()
    truth = sc.truth
    fits = {}
    rows = []
    for n in sc.sizes:
        seeds = [sc.base_seed + i for i in range(sc.n_seeds)]
        if n_jobs == 1:
            out = [_one_fit(sc.model, truth, n, s, cfg) for s in seeds]
        else:
            out = Parallel(n_jobs=n_jobs)(delayed(_one_fit)(sc.model, truth, n, s, cfg) for s in seeds)
        n_bad = sum(isinstance(f, str) for f in out)
        if n_bad:
            logger.warning("%s, n=%d: %d of %d fits failed", sc.name, n, n_bad, len(out))
        fits[n] = out
        rows.extend(_summarize(truth, n, out))
    return McReport(scenario=sc, rows=rows, fits=fits)


def convergence_curve(generator: str, params: Sequence[float], sizes=CURVE_SIZES,
                      n_seeds: int = DESK_SEEDS, base_seed: int = 0,
                      cfg: FitConfig | None = None, n_jobs: int = 1) -> list[dict]:
    """Tail-index error of the three-component fit as a function of sample size.

    Returns one record per size, in increasing size order, with the error
    of the mean estimate of ``xi`` and ``alpha = 1/xi`` and the median
    absolute relative error across seeds.
    """
    sc = McScenario(generator=generator, params=tuple(params), fitter="three-component",
                    sizes=tuple(sorted(int(n) for n in sizes)), n_seeds=n_seeds, base_seed=base_seed)
    rep = run_mc_study(sc, cfg, n_jobs)
    curve = []
    for n in sc.sizes:
        rx, ra = rep.row(n, "xi"), rep.row(n, "alpha")
        curve.append({"size": n, "xi_mean": rx["mean"], "xi_error": rx["error"],
                      "xi_median_abs_error": rx["median_abs_error"],
                      "alpha_error": ra["error"], "alpha_median_abs_error": ra["median_abs_error"],
                      "n_ok": rx["n_ok"]})
    return curve


def _safe_name(s: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in s)


def write_mc_report(rep: McReport, out_dir: str, stem: str = "mc") -> dict:
    """Write the summary as CSV and JSON and each fit trace to ``traces/``.

    Returns the paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    trace_dir = os.path.join(out_dir, "traces")
    os.makedirs(trace_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{stem}_summary.csv")
    json_path = os.path.join(out_dir, f"{stem}_summary.json")
    cols = ["size", "param", "truth", "mean", "std", "error", "error_kind", "median_abs_error",
            "truth_level", "mean_level", "n_ok", "n_failed", "n_not_converged"]
    with open(csv_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rep.rows:
            w.writerow({k: r.get(k, "") for k in cols})
    with open(json_path, "w") as fh:
        json.dump(rep.as_dict(), fh, indent=2, sort_keys=True, allow_nan=True)
    base = _safe_name(rep.scenario.name)
    for n, fits in rep.fits.items():
        for i, f in enumerate(fits):
            seed = rep.scenario.base_seed + i
            path = os.path.join(trace_dir, f"{base}_n{n}_seed{seed}.json")
            payload = f.as_dict() if isinstance(f, FitReport) else {"error": f}
            with open(path, "w") as fh:
                json.dump(payload, fh, sort_keys=True)
    return {"csv": csv_path, "json": json_path, "traces": trace_dir}
