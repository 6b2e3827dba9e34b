import csv
import datetime as dt
import json

import numpy as np
import pytest

from hybridtail.cli import main, period_index
from hybridtail.distcore import derive_dependent_params
from hybridtail.ingest import ingest

ROW08 = (0.0, 5.0, 4.38, 0.8)


@pytest.fixture(scope="module")
def losses(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    x = derive_dependent_params(ROW08).sample(3000, 1) * 1000
    rng = np.random.default_rng(2)
    start = dt.date(2015, 1, 1)
    days = np.sort(rng.integers(0, 4 * 365, x.size))
    path = d / "losses.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "amount", "report_date", "class"])
        for i, (v, day) in enumerate(zip(x, days)):
            w.writerow([i, repr(float(v)), (start + dt.timedelta(days=int(day))).isoformat(), "AB"[i % 2]])
    return path


def run(*argv):
    return main([str(a) for a in argv])


# ---------------------------------------------------------------------- ingest

def test_ingest_min_amount(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("amount\n0\n100\n600\n")
    t = ingest(str(p), min_amount=500)
    np.testing.assert_array_equal(t.amounts, [600.0])
    assert t.provenance["dropped"]["below_min_amount"] == 2
    assert t.provenance["input_rows"] == 3


def test_ingest_drop_nonpositive(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("amount\n-1\n0\n5\n")
    t = ingest(str(p), drop_nonpositive=True)
    np.testing.assert_array_equal(t.amounts, [5.0])
    assert t.provenance["dropped"]["nonpositive"] == 2


def test_ingest_records_unparseable_rows(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("amount\n" + "\n".join(["1"] * 20 + ["oops"]) + "\n")
    t = ingest(str(p))
    assert t.n == 20 and t.errors[0][0] == 22
    prov = t.provenance
    assert prov["kept"] + sum(prov["dropped"].values()) == prov["input_rows"]


def test_ingest_rejects_mostly_garbage(tmp_path):
    from hybridtail.exceptions import InputError
    p = tmp_path / "a.csv"
    p.write_text("amount\n1\nx\ny\n")
    with pytest.raises(InputError):
        ingest(str(p))
    with pytest.raises(InputError):
        ingest(str(p), column="loss")


def test_period_index():
    dates = [dt.date(2020, 2, 1), dt.date(2020, 3, 31), dt.date(2020, 4, 1), dt.date(2021, 1, 5)]
    np.testing.assert_array_equal(period_index(dates, 3), [0, 0, 1, 4])
    np.testing.assert_array_equal(period_index(dates, 1), [0, 1, 2, 11])


# ------------------------------------------------------------------------ verbs

def test_fit_outputs_and_schema(losses, tmp_path):
    assert run("fit", "--input", losses, "--out-dir", tmp_path, "--by-group", "class") == 0
    art = json.loads((tmp_path / "fit.json").read_text())
    assert art["tool"] == "hybridtail" and art["command"] == "fit"
    assert len(art["input"]["sha256"]) == 64
    params = art["result"]["parameters"]
    assert {k for k, v in params.items() if v["free"]} == {"mu", "sigma", "u2", "xi"}
    for f in ("fit_survival.csv", "fit_survival.png", "fit_cdf.png", "fit_groups.csv", "fit.meta.json"):
        assert (tmp_path / f).exists(), f
    assert len(art["result"]["groups"]) == 2


def test_fit_rmse_recomputed_from_csv(losses, tmp_path):
    run("fit", "--input", losses, "--out-dir", tmp_path, "--no-plots")
    art = json.loads((tmp_path / "fit.json").read_text())
    with open(tmp_path / "fit_survival.csv") as fh:
        rows = list(csv.DictReader(fh))
    d = np.array([100 * (float(r["model_cdf"]) - float(r["empirical_cdf"])) for r in rows])
    assert np.sqrt(np.mean(d**2)) == pytest.approx(art["result"]["goodness_of_fit"]["rmse_total"], rel=1e-12)


def test_outputs_are_byte_identical_across_runs(losses, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("fit", "--input", losses, "--out-dir", a)
    run("fit", "--input", losses, "--out-dir", b)
    for f in ("fit.json", "fit_survival.csv", "fit_survival.png"):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_risk_from_fit(losses, tmp_path):
    run("fit", "--input", losses, "--out-dir", tmp_path, "--no-plots")
    assert run("risk", "--input", losses, "--fit", tmp_path / "fit.json", "--out-dir", tmp_path,
               "--levels", "var:0.5,var:0.995,es:0.9977", "--k", "500") == 0
    with open(tmp_path / "risk.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["marker"] == "below-tail-region" and rows[0]["value"] == ""
    es = [r for r in rows if r["measure"] == "ES"]
    assert {r["method"] for r in es} == {"analytic", "numeric"}


def test_config_file_and_flag_precedence(losses, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[jackknife]\nm = 4\nseed = 3\n[fit]\nmax_outer_iters = 40\n')
    assert run("jackknife", "--input", losses, "--config", cfg, "--m", "3", "--out-dir", tmp_path) == 0
    art = json.loads((tmp_path / "jackknife.json").read_text())
    assert art["config"]["m"] == 3 and art["config"]["seed"] == 3
    assert art["config"]["fit"]["max_outer_iters"] == 40


def test_hill_and_describe(losses, tmp_path):
    assert run("hill", "--input", losses, "--quantile", "0.95", "--out-dir", tmp_path) == 0
    h = json.loads((tmp_path / "hill.json").read_text())["result"]
    assert h["k"] == 150
    assert run("describe", "--input", losses, "--date-column", "report_date", "--out-dir", tmp_path) == 0
    d = json.loads((tmp_path / "describe.json").read_text())["result"]
    assert sum(d["frequency"]["counts"]) == 3000
    assert (tmp_path / "describe_frequency.csv").exists()


def test_poisson_gpd_verb(losses, tmp_path):
    assert run("poisson-gpd", "--input", losses, "--u2", "5000", "--out-dir", tmp_path,
               "--assume-stationary") == 0
    r = json.loads((tmp_path / "poisson-gpd.json").read_text())["result"]
    assert sum(r["period_counts"]) == r["n_exceedances"]
    assert r["lambda"] == pytest.approx(r["n_exceedances"] / len(r["period_counts"]))


def test_mc_verb(tmp_path):
    assert run("mc", "--row", "ln-gpd-1/3", "--sizes", "1000", "--seeds", "2", "--out-dir", tmp_path) == 0
    assert (tmp_path / "mc_summary.csv").exists()
    assert json.loads((tmp_path / "mc.json").read_text())["config"]["scenario"]["n_seeds"] == 2


def test_exit_codes(tmp_path):
    bad = tmp_path / "x.csv"
    bad.write_text("amount\n1\n2\n")
    assert run("fit", "--input", bad, "--out-dir", tmp_path) == 2
    assert run("fit", "--input", tmp_path / "missing.csv", "--out-dir", tmp_path) == 2
    with pytest.raises(SystemExit):
        run("fit")
