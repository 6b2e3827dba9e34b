"""
Command-line entry point
------------------------

``hybridtail <verb> [options]`` with verbs ``fit``, ``risk``, ``jackknife``,
``hill``, ``poisson-gpd``, ``describe`` and ``mc``.

Every verb writes ``<verb>.json`` (the run artifact: configuration, input
digest, result) and one or more CSV tables to ``--out-dir``. Wall-clock
times go to ``<verb>.meta.json`` only, so the other files are identical
across reruns with the same input and configuration.

Settings are resolved as built-in defaults, then the ``--config`` TOML
file, then command-line flags.

Exit codes: 0 success, 2 input error, 3 non-convergence, 4 infeasible model.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .calibrate import MODELS, FitConfig, fit_model, params_from_dict
from .estimators import (
    EmpiricalDist,
    FrequencySeries,
    descriptive_stats,
    empirical_quantile,
    hill_estimate,
    moving_average,
    normalized_monthly_deviation,
)
from .exceptions import ConstraintError, ConvergenceError, DomainError, InputError
from .freqsev import ExceedanceSeries, fit_poisson_gpd
from .ingest import LossTable, ingest
from .resample import jackknife
from .riskmeasures import es_analytic, es_empirical, es_numeric, tail_model_from_fit, var_gpd
from .simlab import (
    DESK_SEEDS,
    GENERATOR_ROWS,
    FULL_SEEDS,
    convergence_curve,
    run_mc_study,
    scenario_from_mapping,
    write_mc_report,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger("hybridtail")

EXIT_OK, EXIT_INPUT, EXIT_NOCONV, EXIT_INFEASIBLE = 0, 2, 3, 4
DEFAULT_LEVELS = "var:0.995,es:0.975,es:0.9977"
PERIOD_MONTHS = {"month": 1, "quarter": 3, "year": 12}


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _clean(obj):
    """Make ``obj`` strict-JSON: NaN becomes null, infinities become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (dt.date, dt.datetime)):
        return obj.isoformat()
    return obj


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if (isinstance(v, float) and math.isnan(v)) else
                        (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for v in r])
    return path


def _artifact(verb, args, config, table: LossTable | None, result) -> dict:
    out = {"tool": "hybridtail", "version": __version__, "command": verb,
           "config": config, "result": result}
    if table is not None:
        out["input"] = {"path": os.path.basename(table.source), "sha256": table.digest,
                        "provenance": table.provenance, "n_errors": len(table.errors)}
    return out


def _finish(args, verb, artifact, started):
    os.makedirs(args.out_dir, exist_ok=True)
    path = _write_json(os.path.join(args.out_dir, f"{verb}.json"), artifact)
    meta = {"started": started, "finished": dt.datetime.now(dt.timezone.utc).isoformat(),
            "argv": sys.argv[1:]}
    _write_json(os.path.join(args.out_dir, f"{verb}.meta.json"), meta)
    return path


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None


def _fit_config(file_cfg: dict) -> FitConfig:
    return FitConfig.from_mapping(file_cfg.get("fit", {}))


def _opt(args, file_cfg, section, key, default):
    """Flag value if given, else the config file's, else ``default``."""
    v = getattr(args, key.replace("-", "_"), None)
    if v is not None:
        return v
    return file_cfg.get(section, {}).get(key, default)


def _load_table(args, file_cfg, dates=False, groups=False) -> LossTable:
    sec = "input"
    table = ingest(
        args.input,
        column=_opt(args, file_cfg, sec, "column", "amount"),
        min_amount=_opt(args, file_cfg, sec, "min_amount", None),
        drop_nonpositive=bool(_opt(args, file_cfg, sec, "drop_nonpositive", False)),
        date_column=_opt(args, file_cfg, sec, "date_column", None) if dates else None,
        group_column=_opt(args, file_cfg, sec, "group_column", None) if groups else None,
    )
    if table.errors:
        os.makedirs(args.out_dir, exist_ok=True)
        _write_csv(os.path.join(args.out_dir, "input_errors.csv"), ["line", "reason"], table.errors)
        logger.warning("%d unparseable rows written to input_errors.csv", len(table.errors))
    return table


def _input_section(args, file_cfg):
    return {k: _opt(args, file_cfg, "input", k, d) for k, d in
            (("column", "amount"), ("min_amount", None), ("drop_nonpositive", False))}


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def cmd_fit(args, file_cfg) -> int:
    from .plotting import plot_cdf, plot_survival

    table = _load_table(args, file_cfg, groups=bool(args.group_column))
    cfg = _fit_config(file_cfg)
    model = _opt(args, file_cfg, "fit", "model", "ln-e-gpd")
    rep = fit_model(table.amounts, model, cfg)
    p = rep.params

    x = np.sort(table.amounts)
    n = x.size
    ecdf = np.searchsorted(x, x, side="right") / n
    mcdf = np.asarray(p.cdf(x), dtype=float)
    rows = [(xi, 1.0 - e, float(s), e, m) for xi, e, s, m in zip(x, ecdf, p.sf(x), mcdf)]
    stem = os.path.join(args.out_dir, "fit")
    os.makedirs(args.out_dir, exist_ok=True)
    _write_csv(stem + "_survival.csv",
               ["x", "empirical_survival", "model_survival", "empirical_cdf", "model_cdf"], rows)
    if not args.no_plots:
        plot_survival(x, 1.0 - ecdf, p.sf(x), stem + "_survival.png", p.u1, p.u2, model)
        plot_cdf(x, ecdf, mcdf, stem + "_cdf.png", p.u1, p.u2, model)

    result = rep.as_dict()
    if args.group_column:
        result["groups"] = _group_table(table, model, cfg, args.out_dir)
    config = {"model": model, "fit": cfg.__dict__, "input": _input_section(args, file_cfg)}
    _finish(args, "fit", _artifact("fit", args, config, table, result), args._started)
    print(f"{model}: xi={p.xi:.6g} u1={p.u1:.6g} u2={p.u2:.6g} bic={rep.bic:.6g} "
          f"converged={rep.converged}")
    return EXIT_OK if rep.converged else EXIT_NOCONV


def _group_table(table: LossTable, model, cfg, out_dir):
    """Fit each class separately to compare tail indices."""
    labels = np.asarray(table.groups)
    out = []
    for g in sorted(set(table.groups)):
        xg = table.amounts[labels == g]
        rec = {"group": g, "n": int(xg.size)}
        try:
            r = fit_model(xg, model, cfg)
            rec.update(xi=r.params.xi, alpha=1.0 / r.params.xi, u2=r.params.u2,
                       converged=r.converged)
        except InputError as exc:
            rec.update(xi=math.nan, alpha=math.nan, u2=math.nan, converged=False, note=str(exc))
        out.append(rec)
    _write_csv(os.path.join(out_dir, "fit_groups.csv"), ["group", "n", "xi", "alpha", "u2", "converged"],
               [(r["group"], r["n"], r["xi"], r["alpha"], r["u2"], r["converged"]) for r in out])
    return out


def _parse_levels(spec: str):
    out = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        kind, _, val = item.rpartition(":")
        kinds = [kind.lower()] if kind else ["var", "es"]
        for k in kinds:
            if k not in ("var", "es"):
                raise InputError(f"unknown risk measure {k!r} in --levels")
            p = float(val)
            if not 0 < p < 1:
                raise InputError(f"level {p} outside (0, 1)")
            out.append((k, p))
    return out


def cmd_risk(args, file_cfg) -> int:
    table = _load_table(args, file_cfg)
    with open(args.fit) as fh:
        art = json.load(fh)
    res = art.get("result", art)
    params = params_from_dict(res["model"], res["parameters"])
    tm = tail_model_from_fit(table.amounts, params)
    levels = _parse_levels(_opt(args, file_cfg, "risk", "levels", DEFAULT_LEVELS))
    k = int(_opt(args, file_cfg, "risk", "k", 20000))
    dist = EmpiricalDist.from_data(table.amounts)
    mean = tm.sample_mean

    rows = []
    for kind, p in levels:
        in_tail = p >= tm.p_min
        if kind == "var":
            emp = empirical_quantile(dist, p)
            vals = {"analytic": var_gpd(p, tm) if in_tail else math.nan}
        else:
            emp = es_empirical(dist, p, k)
            if not in_tail:
                vals = {"analytic": math.nan, "numeric": math.nan}
            else:
                vals = {"analytic": es_analytic(p, tm) if tm.gpd.xi < 1 else math.inf,
                        "numeric": es_numeric(p, tm, k)}
        for method, v in vals.items():
            if not in_tail:
                marker = "below-tail-region"
            elif math.isinf(v):
                marker = "infinite-mean"
            else:
                marker = ""
            delta = (v - emp) / emp if (math.isfinite(v) and emp != 0) else math.nan
            rows.append({"measure": kind.upper(), "level": p, "method": method, "value": v,
                         "multiple": v / mean if math.isfinite(v) else math.nan,
                         "empirical": emp, "empirical_multiple": emp / mean,
                         "delta": delta, "marker": marker})
    cols = ["measure", "level", "method", "value", "multiple", "empirical",
            "empirical_multiple", "delta", "marker"]
    os.makedirs(args.out_dir, exist_ok=True)
    _write_csv(os.path.join(args.out_dir, "risk.csv"), cols, [[r[c] for c in cols] for r in rows])
    result = {"tail_model": {"xi": tm.gpd.xi, "beta": tm.gpd.beta, "u2": tm.u2,
                             "tail_prob": tm.tail_prob, "sample_mean": mean},
              "fit_artifact_model": res["model"], "k": k, "rows": rows}
    config = {"levels": [f"{a}:{b}" for a, b in levels], "k": k, "input": _input_section(args, file_cfg)}
    _finish(args, "risk", _artifact("risk", args, config, table, result), args._started)
    for r in rows:
        print(f"{r['measure']}({r['level']:g}) {r['method']}: {r['multiple']:.4g} x mean "
              f"(empirical {r['empirical_multiple']:.4g}) {r['marker']}")
    return EXIT_OK


def cmd_jackknife(args, file_cfg) -> int:
    table = _load_table(args, file_cfg)
    cfg = _fit_config(file_cfg)
    model = _opt(args, file_cfg, "fit", "model", "ln-e-gpd")
    m = int(_opt(args, file_cfg, "jackknife", "m", 10))
    seed = int(_opt(args, file_cfg, "jackknife", "seed", 0))
    n_jobs = int(_opt(args, file_cfg, "jackknife", "n_jobs", 1))

    def estimator(d):
        p = fit_model(d, model, cfg).params
        return [p.xi, 1.0 / p.xi, p.beta, p.u2]

    res = jackknife(table.amounts, estimator, m=m, seed=seed,
                    names=["xi", "alpha", "beta", "u2"], n_jobs=n_jobs)
    cols = ["name", "full_estimate", "pooled_mean", "sigma_hat", "a95", "cr95_lo", "cr95_hi",
            "rel_half_width"]
    os.makedirs(args.out_dir, exist_ok=True)
    _write_csv(os.path.join(args.out_dir, "jackknife.csv"), cols,
               [[r.name, r.full_estimate, r.pooled_mean, r.sigma_hat, r.a95, r.cr95[0], r.cr95[1],
                 r.rel_half_width] for r in res])
    config = {"model": model, "fit": cfg.__dict__, "m": m, "seed": seed,
              "input": _input_section(args, file_cfg)}
    _finish(args, "jackknife", _artifact("jackknife", args, config, table,
                                         {"results": [r.as_dict() for r in res]}), args._started)
    for r in res:
        print(f"{r.name}: {r.full_estimate:.6g} +/- {r.a95:.4g} ({100 * r.rel_half_width:.2f}%)")
    return EXIT_OK


def cmd_hill(args, file_cfg) -> int:
    table = _load_table(args, file_cfg)
    dist = EmpiricalDist.from_data(table.amounts)
    if args.u2 is not None:
        u2 = args.u2
    else:
        u2 = empirical_quantile(dist, _opt(args, file_cfg, "hill", "quantile", 0.966))
    h = hill_estimate(dist, u2=u2)
    result = {"xi_hat": h.xi_hat, "alpha_hat": h.alpha_hat, "k": h.k, "u2": h.u2,
              "ci95": list(h.ci95), "degenerate": h.degenerate, "requested_u2": u2}
    os.makedirs(args.out_dir, exist_ok=True)
    _write_csv(os.path.join(args.out_dir, "hill.csv"), ["xi_hat", "k", "u2", "ci95_lo", "ci95_hi"],
               [[h.xi_hat, h.k, h.u2, h.ci95[0], h.ci95[1]]])
    config = {"u2": args.u2, "quantile": args.quantile, "input": _input_section(args, file_cfg)}
    _finish(args, "hill", _artifact("hill", args, config, table, result), args._started)
    print(f"hill: xi={h.xi_hat:.6g} k={h.k} u2={h.u2:.6g} ci95=[{h.ci95[0]:.4g}, {h.ci95[1]:.4g}]")
    return EXIT_OK


def period_index(dates, months: int):
    """Calendar period of each date, counted from the first period of the sample."""
    start = min(dates)
    s0 = start.year * 12 + (start.month - 1) // months * months
    return np.array([((d.year * 12 + d.month - 1) - s0) // months for d in dates], dtype=int)


def cmd_poisson_gpd(args, file_cfg) -> int:
    table = _load_table(args, file_cfg, dates=True)
    if table.report_dates is None:
        raise InputError("poisson-gpd needs --date-column")
    if args.u2 is not None:
        u = float(args.u2)
    elif args.fit:
        with open(args.fit) as fh:
            res = json.load(fh)
        res = res.get("result", res)
        u = float(res["parameters"]["u2"]["value"])
    else:
        raise InputError("give --u2 or --fit to set the threshold")
    months = PERIOD_MONTHS[args.period]
    idx = period_index(table.report_dates, months)
    counts_all = np.bincount(idx)
    above = table.amounts > u
    counts = np.bincount(idx[above], minlength=counts_all.size)
    order = np.argsort(idx[above], kind="stable")
    series = ExceedanceSeries(table.amounts[above][order], counts)
    if not args.assume_stationary:
        logger.warning("exceedance counts are treated as stationary; pass --assume-stationary "
                       "to record that this was checked")
    fit = fit_poisson_gpd(series, u, time_unit=args.period)
    result = fit.as_dict()
    result.update(period_counts=counts.tolist(), stationarity_asserted=bool(args.assume_stationary))
    os.makedirs(args.out_dir, exist_ok=True)
    _write_csv(os.path.join(args.out_dir, "poisson_gpd.csv"),
               ["parameter", "estimate", "std_err", "ci95_lo", "ci95_hi"],
               [[k, v, fit.std_err[k], fit.ci95[k][0], fit.ci95[k][1]]
                for k, v in (("lambda", fit.params.lam), ("xi", fit.params.xi), ("beta", fit.params.beta))])
    config = {"u": u, "period": args.period, "input": _input_section(args, file_cfg)}
    _finish(args, "poisson-gpd", _artifact("poisson-gpd", args, config, table, result), args._started)
    p = fit.params
    print(f"poisson-gpd: lambda={p.lam:.6g} per {args.period}, xi={p.xi:.6g}, beta={p.beta:.6g}")
    return EXIT_OK


def cmd_describe(args, file_cfg) -> int:
    table = _load_table(args, file_cfg, dates=bool(args.date_column))
    st = descriptive_stats(table.amounts)
    result = {"stats": st.as_dict()}
    os.makedirs(args.out_dir, exist_ok=True)
    cols = ["n", "max", "mean", "median", "std", "di", "skewness", "kurtosis"]
    _write_csv(os.path.join(args.out_dir, "describe.csv"), cols, [[getattr(st, c) for c in cols]])
    if table.report_dates is not None:
        months = PERIOD_MONTHS[args.period]
        counts = np.bincount(period_index(table.report_dates, months))
        fs = FrequencySeries(counts, period_months=months)
        dev = normalized_monthly_deviation(fs)
        window = min(int(args.window), fs.k_t)
        ma = moving_average(fs, window)
        rows = [[i, int(c), dev[i], ma[i - window + 1] if i >= window - 1 else math.nan]
                for i, c in enumerate(counts)]
        _write_csv(os.path.join(args.out_dir, "describe_frequency.csv"),
                   ["period", "count", "normalized_deviation", "moving_average"], rows)
        result["frequency"] = {"period": args.period, "counts": counts.tolist(), "window": window}
    config = {"period": args.period, "input": _input_section(args, file_cfg)}
    _finish(args, "describe", _artifact("describe", args, config, table, result), args._started)
    print(" ".join(f"{c}={getattr(st, c):.6g}" for c in cols))
    return EXIT_OK


def cmd_mc(args, file_cfg) -> int:
    from .plotting import plot_convergence

    mc = dict(file_cfg.get("mc", {}))
    if args.row:
        mc["row"] = args.row
    if "row" not in mc and "generator" not in mc:
        mc["row"] = "ln-e-gpd-1/3"
    if args.fitter:
        mc["fitter"] = args.fitter
    if args.sizes:
        mc["sizes"] = [int(s) for s in args.sizes.split(",")]
    if args.seed is not None:
        mc["base_seed"] = args.seed
    mc["n_seeds"] = FULL_SEEDS if args.full_scale else int(args.seeds or mc.get("n_seeds", DESK_SEEDS))
    sc = scenario_from_mapping(mc)
    cfg = _fit_config(file_cfg)
    rep = run_mc_study(sc, cfg, n_jobs=args.n_jobs)
    os.makedirs(args.out_dir, exist_ok=True)
    write_mc_report(rep, args.out_dir)
    result = rep.as_dict()
    if args.curve:
        curve = convergence_curve(sc.generator, sc.params, n_seeds=sc.n_seeds, base_seed=sc.base_seed,
                                  cfg=cfg, n_jobs=args.n_jobs)
        result["convergence_curve"] = curve
        _write_csv(os.path.join(args.out_dir, "mc_convergence.csv"), list(curve[0]),
                   [list(r.values()) for r in curve])
        if not args.no_plots:
            plot_convergence({sc.name: curve}, os.path.join(args.out_dir, "mc_convergence.png"))
    config = {"scenario": sc.as_dict(), "fit": cfg.__dict__, "full_scale": bool(args.full_scale)}
    _finish(args, "mc", _artifact("mc", args, config, None, result), args._started)
    for r in rep.rows:
        if r["param"] in ("xi", "u1", "u2"):
            print(f"n={r['size']} {r['param']}: mean={r['mean']:.5g} truth={r['truth']:.5g} "
                  f"error={100 * r['error']:.2f}% ({r['n_ok']} fits)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridtail", description=__doc__.split("\n")[1])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, data=True):
        if data:
            p.add_argument("--input", required=True, help="CSV file with a header row")
            p.add_argument("--column", default=None, help="amount column (default: amount)")
            p.add_argument("--min-amount", type=float, default=None, dest="min_amount")
            p.add_argument("--drop-nonpositive", action="store_const", const=True, default=None,
                           dest="drop_nonpositive")
        p.add_argument("--config", default=None, help="TOML file; flags override its values")
        p.add_argument("--out-dir", default=".", dest="out_dir")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("fit", help="calibrate a hybrid model")
    common(p)
    p.add_argument("--model", choices=sorted(MODELS), default=None)
    p.add_argument("--by-group", default=None, dest="group_column",
                   help="also fit each class of this column separately")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("risk", help="VaR and ES from a fit artifact")
    common(p)
    p.add_argument("--fit", required=True, help="fit.json written by the fit verb")
    p.add_argument("--levels", default=None, help=f"e.g. {DEFAULT_LEVELS}")
    p.add_argument("--k", type=int, default=None, help="grid size of the averaged ES")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("jackknife", help="delete-block jackknife of the fit")
    common(p)
    p.add_argument("--model", choices=sorted(MODELS), default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-jobs", type=int, default=None, dest="n_jobs")
    p.set_defaults(func=cmd_jackknife)

    p = sub.add_parser("hill", help="Hill estimate above a threshold")
    common(p)
    p.add_argument("--u2", type=float, default=None)
    p.add_argument("--quantile", type=float, default=None, help="threshold as a quantile level")
    p.set_defaults(func=cmd_hill)

    p = sub.add_parser("poisson-gpd", help="Poisson-GPD model of the exceedances")
    common(p)
    p.add_argument("--date-column", default="report_date", dest="date_column")
    p.add_argument("--u2", type=float, default=None)
    p.add_argument("--fit", default=None, help="take the threshold from a fit artifact")
    p.add_argument("--period", choices=sorted(PERIOD_MONTHS), default="quarter")
    p.add_argument("--assume-stationary", action="store_true", dest="assume_stationary")
    p.set_defaults(func=cmd_poisson_gpd)

    p = sub.add_parser("describe", help="descriptive statistics and frequency series")
    common(p)
    p.add_argument("--date-column", default=None, dest="date_column")
    p.add_argument("--period", choices=sorted(PERIOD_MONTHS), default="month")
    p.add_argument("--window", type=int, default=12)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("mc", help="Monte Carlo study of the fitting algorithm")
    common(p, data=False)
    p.add_argument("--row", choices=sorted(GENERATOR_ROWS), default=None)
    p.add_argument("--fitter", choices=["three-component", "two-component"], default=None)
    p.add_argument("--sizes", default=None, help="comma-separated sample sizes")
    p.add_argument("--seeds", type=int, default=None, help="number of seeds")
    p.add_argument("--seed", type=int, default=None, help="base seed")
    p.add_argument("--full-scale", action="store_true", dest="full_scale",
                   help=f"use {FULL_SEEDS} seeds")
    p.add_argument("--curve", action="store_true", help="also run the sample-size sweep")
    p.add_argument("--n-jobs", type=int, default=1, dest="n_jobs")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_mc)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args._started = dt.datetime.now(dt.timezone.utc).isoformat()
    t0 = time.perf_counter()
    try:
        file_cfg = _load_config(args.config)
        code = args.func(args, file_cfg)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConstraintError, DomainError) as exc:
        print(f"infeasible model: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    logger.info("done in %.2fs", time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
