"""Hybrid lognormal / exponential / GPD loss models with automatic tail-threshold detection."""

from .calibrate import FitConfig, FitReport, fit_gauss_hybrid, fit_hybrid, fit_lngpd, fit_model, lm_minimize
from .distcore import (
    GpdParams,
    HybridParams,
    LnGpdParams,
    derive_dependent_params,
    derive_gauss_hybrid_params,
    derive_lngpd_params,
    hybrid_cdf,
    hybrid_pdf,
    hybrid_quantile,
    hybrid_sample,
)
from .estimators import EmpiricalDist, descriptive_stats, empirical_quantile, hill_estimate
from .exceptions import ConstraintError, ConvergenceError, DomainError, HybridTailError, InputError
from .freqsev import ExceedanceSeries, PoissonGpdParams, fit_poisson_gpd, poisson_gpd_cdf
from .resample import jackknife
from .riskmeasures import TailModel, es_analytic, es_empirical, es_numeric, var_gpd

__version__ = "0.1.0"

__all__ = [
    "FitConfig", "FitReport", "fit_hybrid", "fit_lngpd", "fit_gauss_hybrid", "fit_model", "lm_minimize",
    "GpdParams", "HybridParams", "LnGpdParams", "derive_dependent_params", "derive_gauss_hybrid_params",
    "derive_lngpd_params", "hybrid_pdf", "hybrid_cdf", "hybrid_quantile", "hybrid_sample",
    "EmpiricalDist", "descriptive_stats", "empirical_quantile", "hill_estimate",
    "HybridTailError", "InputError", "DomainError", "ConstraintError", "ConvergenceError",
    "ExceedanceSeries", "PoissonGpdParams", "fit_poisson_gpd", "poisson_gpd_cdf",
    "jackknife", "TailModel", "var_gpd", "es_analytic", "es_numeric", "es_empirical",
    "__version__",
]
