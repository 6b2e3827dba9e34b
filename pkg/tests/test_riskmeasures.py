import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridtail.distcore import GpdParams, derive_dependent_params
from hybridtail.exceptions import DomainError, InputError
from hybridtail.riskmeasures import (
    TailModel,
    es_analytic,
    es_analytic_asymptotic,
    es_empirical,
    es_numeric,
    level_grid,
    tail_model_from_fit,
    var_gpd,
    var_gpd_asymptotic,
)

# frozen from tests/oracles.py
TM = TailModel(GpdParams(xi=0.8088, beta=8087.11, u=9999.34), tail_prob=0.034, sample_mean=3476.67)
ORACLE = {"var995": 13.5558265891643, "es975": 19.2890114498912, "es9977": 132.860517023571,
          "var9977": 88317.9638073284, "esgrid9977": 115.014164762658}


def test_var_against_oracle():
    assert TM.multiple(var_gpd(0.995, TM)) == pytest.approx(ORACLE["var995"], rel=1e-11)
    assert var_gpd(0.9977, TM) == pytest.approx(ORACLE["var9977"], rel=1e-11)


def test_es_against_oracle():
    assert TM.multiple(es_analytic(0.975, TM)) == pytest.approx(ORACLE["es975"], rel=1e-11)
    assert TM.multiple(es_analytic(0.9977, TM)) == pytest.approx(ORACLE["es9977"], rel=1e-11)


def test_grid_es_against_oracle():
    assert TM.multiple(es_numeric(0.9977, TM, 20000)) == pytest.approx(ORACLE["esgrid9977"], rel=1e-9)


def test_var_at_tail_boundary_is_threshold():
    assert var_gpd(1 - 0.034, TM) == pytest.approx(9999.34, rel=1e-14)


def test_var_exponential_limit():
    tm = TailModel(GpdParams(0.0, 2.0, u=5.0), tail_prob=0.1)
    assert var_gpd(0.99, tm) == pytest.approx(5.0 + 2.0 * math.log(10), rel=1e-14)


def test_asymptotic_forms_coincide_when_scale_is_tied():
    tm = TailModel(GpdParams(0.4, 0.4 * 50.0, u=50.0), tail_prob=0.05)
    assert var_gpd_asymptotic(0.999, tm) == pytest.approx(var_gpd(0.999, tm), rel=1e-12)
    assert es_analytic_asymptotic(0.999, tm) == pytest.approx(es_analytic(0.999, tm), rel=1e-12)


def test_es_infinite_for_heavy_shape():
    tm = TailModel(GpdParams(1.2, 1.0, u=1.0), tail_prob=0.1)
    with pytest.raises(DomainError):
        es_analytic(0.99, tm)
    assert math.isfinite(es_numeric(0.99, tm, 1000))


@pytest.mark.parametrize("p", [0.5, 1.0, 1.1])
def test_levels_outside_tail_region_raise(p):
    with pytest.raises(DomainError):
        var_gpd(p, TM)


def test_level_grid():
    np.testing.assert_allclose(level_grid(0.9, 4), [0.9, 0.925, 0.95, 0.975])
    with pytest.raises(InputError):
        level_grid(0.9, 0)


def test_empirical_es_hand_case():
    assert es_empirical(np.arange(1.0, 1001.0), 0.99, 10) == pytest.approx(994.5)


def test_grid_es_below_analytic_and_converges():
    tm = TailModel(GpdParams(0.3, 3.0, u=10.0), tail_prob=0.05)
    exact = es_analytic(0.99, tm)
    errs = [exact - es_numeric(0.99, tm, k) for k in (100, 1000, 10000)]
    assert all(e > 0 for e in errs)
    assert errs[0] > errs[1] > errs[2]


@given(st.floats(0.01, 0.95), st.floats(0.1, 100), st.floats(0.001, 0.2),
       st.floats(0.0, 0.999), st.floats(0.0, 0.999))
def test_var_es_ordering(xi, beta, tail, a, b):
    tm = TailModel(GpdParams(xi, beta, u=1.0), tail_prob=tail)
    pa, pb = sorted((1 - tail + a * tail, 1 - tail + b * tail))
    assert var_gpd(pa, tm) <= var_gpd(pb, tm) * (1 + 1e-12)
    assert es_analytic(pa, tm) >= var_gpd(pa, tm) * (1 - 1e-12)


def test_tail_model_from_fit():
    p = derive_dependent_params((1.0, 2.0, 14.59, 1 / 3))
    x = p.sample(2000, 0)
    tm = tail_model_from_fit(x, p)
    assert tm.tail_prob == np.mean(x > p.u2)
    assert tm.sample_mean == pytest.approx(np.mean(x))
    with pytest.raises(InputError):
        tail_model_from_fit(np.array([1.0, 2.0]), p)
