import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridtail.estimators import (
    EmpiricalDist,
    FrequencySeries,
    descriptive_stats,
    empirical_quantile,
    hill_estimate,
    moving_average,
    normalized_monthly_deviation,
)
from hybridtail.exceptions import DomainError, InputError


def test_empirical_cdf_steps():
    d = EmpiricalDist.from_data([3.0, 1.0, 2.0, 2.0])
    np.testing.assert_allclose(d.cdf([0.5, 1.0, 2.0, 2.5, 3.0]), [0, 0.25, 0.75, 0.75, 1.0])
    np.testing.assert_allclose(d.sf([0.5, 3.0]), [1.0, 0.0])


def test_type1_quantile_hand_values():
    d = EmpiricalDist.from_data([10.0, 20.0, 30.0, 40.0])
    assert empirical_quantile(d, 0.25) == 10.0
    assert empirical_quantile(d, 0.26) == 20.0
    assert empirical_quantile(d, 0.999) == 40.0
    np.testing.assert_array_equal(empirical_quantile(d, [0.5, 0.75]), [20.0, 30.0])


def test_type1_quantile_agrees_with_numpy_inverted_cdf():
    x = np.random.default_rng(0).lognormal(size=333)
    d = EmpiricalDist.from_data(x)
    q = np.linspace(0.001, 0.999, 97)
    np.testing.assert_array_equal(empirical_quantile(d, q), np.quantile(x, q, method="inverted_cdf"))


@pytest.mark.parametrize("q", [0.0, 1.0, -0.2, 1.2])
def test_quantile_domain(q):
    with pytest.raises(DomainError):
        empirical_quantile(EmpiricalDist.from_data([1.0, 2.0]), q)


def test_empirical_rejects_empty_and_nan():
    with pytest.raises(InputError):
        EmpiricalDist.from_data([])
    with pytest.raises(InputError):
        EmpiricalDist.from_data([1.0, np.nan])


@given(st.lists(st.floats(0.01, 1e6), min_size=2, max_size=60), st.floats(0.001, 0.999))
def test_quantile_cdf_galois_connection(data, q):
    d = EmpiricalDist.from_data(data)
    v = empirical_quantile(d, q)
    assert d.cdf(v) >= q - 1e-12
    smaller = d.sorted_data[d.sorted_data < v]
    if smaller.size:
        assert d.cdf(smaller[-1]) < q + 1e-12


# ----------------------------------------------------------------------- Hill

def test_hill_hand_case():
    # threshold 1, exceedances 2, 4, 8: mean of ln 2, ln 4, ln 8 is 2 ln 2
    r = hill_estimate(EmpiricalDist.from_data([1.0, 2.0, 4.0, 8.0]), u2=1.0)
    assert r.xi_hat == pytest.approx(2 * math.log(2), rel=1e-15)
    assert r.k == 3
    assert r.alpha_hat == pytest.approx(1 / (2 * math.log(2)))


def test_hill_threshold_snaps_down_to_order_statistic():
    d = EmpiricalDist.from_data([1.0, 2.0, 4.0, 8.0])
    a, b = hill_estimate(d, u2=1.5), hill_estimate(d, u2=1.0)
    assert a.u2 == b.u2 == 1.0 and a.xi_hat == b.xi_hat


def test_hill_by_k_matches_threshold_form():
    x = np.random.default_rng(1).pareto(2.0, 2000) + 1
    d = EmpiricalDist.from_data(x)
    by_k = hill_estimate(d, k=200)
    by_u = hill_estimate(d, u2=by_k.u2)
    assert by_k.xi_hat == by_u.xi_hat and by_u.k == 200


def test_hill_interval_shape():
    x = np.random.default_rng(2).pareto(2.0, 5000) + 1
    r = hill_estimate(EmpiricalDist.from_data(x), k=400)
    half = 1.959963984540054 / 20
    assert r.ci95 == pytest.approx((r.xi_hat * (1 - half), r.xi_hat * (1 + half)))


def test_hill_interval_coverage_on_exact_pareto():
    xi = 0.5
    hits = 0
    for seed in range(200):
        u = np.random.default_rng(seed).random(800)
        r = hill_estimate(EmpiricalDist.from_data(u ** (-xi)), k=400)
        hits += r.ci95[0] <= xi <= r.ci95[1]
    # nominal 95%; 200 trials give a binomial sd of about 1.5%
    assert 0.90 <= hits / 200 <= 0.99


def test_hill_degenerate_tail():
    r = hill_estimate(EmpiricalDist.from_data([1.0, 1.0, 1.0, 1.0]), k=2)
    assert r.degenerate and r.xi_hat == 0 and r.alpha_hat == math.inf


@pytest.mark.parametrize("kw", [{}, {"u2": 1.0, "k": 2}, {"k": 0}, {"k": 4}, {"u2": 0.5}, {"u2": 8.0}])
def test_hill_input_errors(kw):
    with pytest.raises(InputError):
        hill_estimate(EmpiricalDist.from_data([1.0, 2.0, 4.0, 8.0]), **kw)


def test_hill_needs_positive_threshold():
    with pytest.raises(DomainError):
        hill_estimate(EmpiricalDist.from_data([-1.0, 2.0, 4.0]), u2=-1.0)


# ------------------------------------------------------ descriptive statistics

def test_descriptive_stats_two_points():
    s = descriptive_stats([0.0, 2.0])
    assert (s.n, s.max, s.mean, s.median) == (2, 2.0, 1.0, 1.0)
    assert s.std == pytest.approx(math.sqrt(2))
    assert s.di == pytest.approx(math.sqrt(2))
    assert s.skewness == 0.0
    assert s.kurtosis == pytest.approx(1.0)


def test_descriptive_stats_constant_sample_marks_nan():
    s = descriptive_stats([3.0, 3.0, 3.0])
    assert s.std == 0 and math.isnan(s.skewness) and math.isnan(s.kurtosis)


def test_descriptive_stats_zero_mean_marks_nan_index():
    assert math.isnan(descriptive_stats([-1.0, 1.0]).di)


def test_descriptive_stats_against_scipy():
    from scipy import stats
    x = np.random.default_rng(4).lognormal(size=1000)
    s = descriptive_stats(x)
    assert s.skewness == pytest.approx(stats.skew(x), rel=1e-12)
    assert s.kurtosis == pytest.approx(stats.kurtosis(x, fisher=False), rel=1e-12)


@pytest.mark.parametrize("bad", [[1.0], [1.0, np.inf]])
def test_descriptive_stats_input_errors(bad):
    with pytest.raises(InputError):
        descriptive_stats(bad)


# ----------------------------------------------------------- frequency series

def test_normalized_deviation_hand_case():
    np.testing.assert_allclose(normalized_monthly_deviation(FrequencySeries([3, 5])), [-0.25, 0.25])


def test_normalized_deviation_all_zero_is_nan():
    assert np.all(np.isnan(normalized_monthly_deviation(FrequencySeries([0, 0, 0]))))


def test_moving_average_matches_convolution():
    c = np.random.default_rng(5).integers(0, 50, 36)
    got = moving_average(FrequencySeries(c), 6)
    np.testing.assert_allclose(got, np.convolve(c, np.ones(6) / 6, mode="valid"))
    assert got.size == 31


@pytest.mark.parametrize("w", [0, 4])
def test_moving_average_window_errors(w):
    with pytest.raises(InputError):
        moving_average(FrequencySeries([1, 2, 3]), w)


def test_frequency_series_rejects_negative():
    with pytest.raises(InputError):
        FrequencySeries([1, -1])


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=50))
def test_deviation_sums_to_zero(counts):
    d = normalized_monthly_deviation(FrequencySeries(counts))
    if sum(counts):
        assert abs(np.sum(d)) < 1e-9 * len(counts)
