"""The constants frozen into the test modules match a live high-precision recomputation."""

import pytest

pytest.importorskip("mpmath")

import oracles  # noqa: E402
import test_distcore as dc  # noqa: E402
import test_freqsev as fs  # noqa: E402
import test_riskmeasures as rm  # noqa: E402


@pytest.fixture(scope="module")
def live():
    return oracles.frozen_values()


def test_loss_example(live):
    for k, v in dc.LOSS_ORACLE.items():
        assert v == pytest.approx(live[f"loss.{k}"], rel=1e-9), k


@pytest.mark.parametrize("key, table", [("row13", dc.ROW13_ORACLE), ("row08", dc.ROW08_ORACLE)])
def test_generating_rows(live, key, table):
    for k, v in table.items():
        assert v == pytest.approx(live[f"{key}.{k}"], rel=1e-13), k


def test_risk_and_poisson(live):
    for k, v in rm.ORACLE.items():
        assert v == pytest.approx(live[k], rel=1e-13), k
    assert fs.ORACLE_CDF == pytest.approx(live["poisson_cdf"], rel=1e-13)
