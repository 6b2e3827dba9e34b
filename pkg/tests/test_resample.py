import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridtail.exceptions import InputError
from hybridtail.resample import block_partition, jackknife, summarize

Z = 1.959963984540054


@given(st.integers(20, 500), st.integers(2, 10), st.integers(0, 10**6))
def test_partition_is_a_balanced_partition(n, m, seed):
    blocks = block_partition(n, m, seed)
    assert len(blocks) == m
    allidx = np.concatenate(blocks)
    np.testing.assert_array_equal(np.sort(allidx), np.arange(n))
    sizes = [b.size for b in blocks]
    assert max(sizes) - min(sizes) <= 1


def test_partition_is_seeded():
    a, b = block_partition(100, 5, 3), block_partition(100, 5, 3)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = block_partition(100, 5, 4)
    assert not all(np.array_equal(x, y) for x, y in zip(a, c))


def test_two_block_hand_case():
    # estimates 1.0 and 1.1: mean 1.05, sigma^2 = (1 - 1/2) * 2 * 0.05^2
    r = summarize([1.0, 1.1], 1.05)
    assert r.sigma_hat == pytest.approx(0.05, rel=1e-12)
    assert r.a95 == pytest.approx(Z * 0.05, rel=1e-12)
    assert r.a95 == pytest.approx(0.098, abs=5e-4)
    assert r.cr95 == pytest.approx((1.05 - r.a95, 1.05 + r.a95))


def test_mean_estimator_matches_closed_form():
    x = np.random.default_rng(0).normal(size=200)
    (r,) = jackknife(x, np.mean, m=10, seed=1)
    blocks = block_partition(200, 10, 1)
    est = np.array([np.mean(np.delete(x, b)) for b in blocks])
    assert r.sigma_hat == pytest.approx(math.sqrt(0.9 * np.sum((est - est.mean()) ** 2)), rel=1e-12)
    assert r.full_estimate == pytest.approx(np.mean(x))


def test_deterministic_and_independent_of_workers():
    x = np.random.default_rng(2).lognormal(size=500)

    def est(v):
        return [np.mean(v), np.median(v)]

    a = jackknife(x, est, m=5, seed=7, names=["mean", "median"])
    b = jackknife(x, est, m=5, seed=7, names=["mean", "median"], n_jobs=2)
    for ra, rb in zip(a, b):
        np.testing.assert_array_equal(ra.estimates, rb.estimates)
        assert ra.a95 == rb.a95
    assert [r.name for r in a] == ["mean", "median"]


def test_failed_blocks_are_excluded_and_reported():
    x = np.arange(1.0, 201.0)
    bad = set(block_partition(200, 10, 0)[3].tolist())

    def est(v):
        # fails on exactly the subsample that drops block 3
        if not bad & set((v - 1).astype(int).tolist()):
            raise RuntimeError("boom")
        return np.mean(v)

    (r,) = jackknife(x, est, m=10, seed=0)
    assert r.failed_blocks == (3,)
    assert r.m == 9
    assert "boom" in r.warnings[0]


def test_input_errors():
    with pytest.raises(InputError):
        jackknife(np.arange(50.0), np.mean, m=10)
    with pytest.raises(InputError):
        jackknife(np.arange(50.0), np.mean, m=1)
    with pytest.raises(InputError):
        jackknife(np.arange(100.0), np.mean, m=2, names=["a", "b"])


def test_as_dict_has_relative_width():
    (r,) = jackknife(np.arange(1.0, 101.0), np.mean, m=4)
    d = r.as_dict()
    assert d["rel_half_width"] == pytest.approx(r.a95 / r.full_estimate)
