import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize, stats

from hybridtail.exceptions import DomainError, InputError
from hybridtail.freqsev import (
    ExceedanceSeries,
    PoissonGpdParams,
    fit_gpd_mle,
    fit_poisson_gpd,
    gpd_loglik,
    poisson_gpd_cdf,
    poisson_loglik,
)

# frozen from tests/oracles.py
ORACLE_CDF = 0.241940312847789


def _series(xi, beta, u, counts, seed):
    n = int(np.sum(counts))
    mags = u + stats.genpareto.rvs(xi, scale=beta, size=n, random_state=seed)
    return ExceedanceSeries(mags, counts)


def test_cdf_at_threshold_is_exp_minus_lambda():
    p = PoissonGpdParams(lam=3.0, xi=0.5, beta=2.0, u=10.0)
    assert poisson_gpd_cdf(10.0, p) == pytest.approx(math.exp(-3.0), rel=1e-15)


def test_cdf_against_oracle():
    p = PoissonGpdParams(lam=187.07, xi=0.983, beta=8087.63, u=9999.34)
    assert poisson_gpd_cdf(1e6, p) == pytest.approx(ORACLE_CDF, rel=1e-12)


def test_cdf_below_threshold_raises():
    with pytest.raises(DomainError):
        poisson_gpd_cdf(5.0, PoissonGpdParams(1.0, 0.5, 1.0, 10.0))


@given(st.floats(0.1, 50), st.floats(0, 2), st.floats(0.1, 100), st.floats(0, 1e4), st.floats(0, 1e4))
def test_cdf_monotone(lam, xi, beta, a, b):
    p = PoissonGpdParams(lam, xi, beta, 1.0)
    lo, hi = sorted((a, b))
    assert poisson_gpd_cdf(1.0 + lo, p) <= poisson_gpd_cdf(1.0 + hi, p)


def test_rate_is_count_over_exposure():
    counts = np.array([2, 4] * 20)
    s = ExceedanceSeries(np.linspace(11, 100, 120), counts)
    f = fit_poisson_gpd(s, u=10.0)
    assert f.params.lam == pytest.approx(3.0)
    assert f.std_err["lambda"] == pytest.approx(math.sqrt(3.0 / 40))


def test_mle_matches_scipy_genpareto_fit():
    y = stats.genpareto.rvs(0.6, scale=3.0, size=3000, random_state=11)
    xi, beta, _ = fit_gpd_mle(y)

    def tight(f, x0, args=(), disp=0):
        return optimize.fmin(f, x0, args=args, disp=0, xtol=1e-12, ftol=1e-14, maxiter=10000)

    c, _, scale = stats.genpareto.fit(y, floc=0, optimizer=tight)
    assert xi == pytest.approx(c, rel=1e-6)
    assert beta == pytest.approx(scale, rel=1e-6)
    assert gpd_loglik(xi, beta, y) >= gpd_loglik(c, scale, y) - 1e-6


def test_round_trip_recovery():
    counts = np.full(60, 50)
    f = fit_poisson_gpd(_series(0.7, 5.0, 100.0, counts, 3), u=100.0)
    lo, hi = f.ci95["xi"]
    assert lo < 0.7 < hi
    lo, hi = f.ci95["beta"]
    assert lo < 5.0 < hi
    assert f.params.lam == 50.0


def test_joint_likelihood_maximum_equals_factorized_fit():
    rng = np.random.default_rng(8)
    counts = rng.poisson(20, 24)
    s = _series(0.4, 2.0, 1.0, counts, 9)
    f = fit_poisson_gpd(s, u=1.0)

    def nll(t):
        lam, xi, beta = math.exp(t[0]), t[1], math.exp(t[2])
        return -(poisson_loglik(lam, s.period_counts) + gpd_loglik(xi, beta, s.magnitudes - 1.0))

    start = [math.log(f.params.lam) + 0.1, f.params.xi + 0.05, math.log(f.params.beta) - 0.1]
    joint = optimize.minimize(nll, start, method="Nelder-Mead",
                              options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
    assert math.exp(joint.x[0]) == pytest.approx(f.params.lam, rel=1e-4)
    assert joint.x[1] == pytest.approx(f.params.xi, rel=1e-3)
    assert -joint.fun == pytest.approx(f.loglik, abs=1e-6)


def test_rebinning_rescales_the_rate():
    monthly = np.tile([3, 4, 5], 12)
    s_month = _series(0.5, 1.0, 0.0, monthly, 1)
    quarterly = monthly.reshape(-1, 3).sum(axis=1)
    s_quarter = ExceedanceSeries(s_month.magnitudes, quarterly)
    a = fit_poisson_gpd(s_month, 0.0)
    b = fit_poisson_gpd(s_quarter, 0.0)
    assert b.params.lam == pytest.approx(3 * a.params.lam)
    assert b.params.xi == a.params.xi
    # monthly counts reported per quarter through the period length
    c = fit_poisson_gpd(ExceedanceSeries(s_month.magnitudes, monthly, period_length=1 / 3), 0.0)
    assert c.params.lam == pytest.approx(b.params.lam)


def test_light_tail_lands_on_boundary():
    y = np.random.default_rng(0).uniform(0, 1, 200)
    s = ExceedanceSeries(y + 5.0, np.full(10, 20))
    f = fit_poisson_gpd(s, 5.0)
    assert f.xi_at_boundary and f.params.xi == 0.0
    assert f.notes


def test_equal_excesses():
    assert fit_gpd_mle(np.full(10, 2.0)) == (0.0, 2.0, True)


@pytest.mark.parametrize("counts, mags", [([10, 10], np.arange(20.0) + 11), ([1] * 10, np.arange(10.0) + 11)])
def test_fit_input_errors(counts, mags):
    with pytest.raises(InputError):
        fit_poisson_gpd(ExceedanceSeries(mags, counts), 10.0)


def test_series_validation():
    with pytest.raises(InputError):
        ExceedanceSeries([1.0, 2.0], [1])
    with pytest.raises(InputError):
        ExceedanceSeries([1.0], [1.5])
    with pytest.raises(InputError):
        fit_poisson_gpd(ExceedanceSeries(np.arange(40.0), [10, 10, 10, 10]), 5.0)
