"""Figures written next to the CSV reports (Agg backend, no pyplot state)."""

from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

__all__ = ["plot_survival", "plot_cdf", "plot_convergence"]


def _save(fig: Figure, path: str) -> str:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    return path


def _mark_thresholds(ax, u1, u2):
    if u1 is not None and u2 is not None and u1 < u2:
        ax.axvline(u1, color="0.5", ls=":", lw=1, label=f"u1 = {u1:.4g}")
    if u2 is not None:
        ax.axvline(u2, color="0.3", ls="--", lw=1, label=f"u2 = {u2:.4g}")


def plot_survival(x, emp_sf, model_sf, path: str, u1=None, u2=None, title: str = "") -> str:
    """Empirical and model survival on log-log axes."""
    x = np.asarray(x, dtype=float)
    keep = (np.asarray(emp_sf) > 0) & (np.asarray(model_sf) > 0)
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot()
    ax.loglog(x[keep], np.asarray(emp_sf)[keep], ".", ms=2, color="0.4", label="empirical")
    ax.loglog(x[keep], np.asarray(model_sf)[keep], "-", color="C3", lw=1.5, label="model")
    _mark_thresholds(ax, u1, u2)
    ax.set_xlabel("amount")
    ax.set_ylabel("P(X > x)")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_cdf(x, emp_cdf, model_cdf, path: str, u1=None, u2=None, title: str = "") -> str:
    """Empirical and model CDF on a log amount axis."""
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot()
    ax.semilogx(x, emp_cdf, ".", ms=2, color="0.4", label="empirical")
    ax.semilogx(x, model_cdf, "-", color="C0", lw=1.5, label="model")
    _mark_thresholds(ax, u1, u2)
    ax.set_xlabel("amount")
    ax.set_ylabel("P(X <= x)")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_convergence(curves: dict, path: str) -> str:
    """Relative error of alpha = 1/xi against sample size, one line per curve."""
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot()
    for label, curve in curves.items():
        sizes = [r["size"] for r in curve]
        err = [100 * r["alpha_error"] for r in curve]
        ax.semilogx(sizes, err, "o-", label=label)
    ax.axhline(0, color="0.6", lw=0.8)
    for s in (-5, 5):
        ax.axhline(s, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("sample size")
    ax.set_ylabel("relative error of alpha (%)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)
