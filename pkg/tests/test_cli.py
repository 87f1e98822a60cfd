import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from gpot.cli import main
from gpot.divergences import divergence_report, eps_key
from gpot.experiments import RESULT_HEADER
from gpot.fileio import read_matrix_csv, write_matrix_csv


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def points(tmp_path):
    p = tmp_path / "x.csv"
    write_matrix_csv(p, np.array([[0.0], [0.1], [0.2]]))
    return p


@pytest.fixture
def covs(tmp_path, rng):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    ma = rng.standard_normal((4, 4))
    mb = rng.standard_normal((4, 4))
    write_matrix_csv(a, ma @ ma.T / 4)
    write_matrix_csv(b, mb @ mb.T / 4)
    return a, b


def test_gram(tmp_path, points):
    out = tmp_path / "k.csv"
    assert run("gram", "--kernel", "se", "--param", 0.1, "--points", points, "--out", out) == 0
    k = read_matrix_csv(out)
    assert k.shape == (3, 3)
    assert k[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-12)
    assert k[0, 2] == pytest.approx(np.exp(-4.0), rel=1e-12)


def test_gram_poly(tmp_path):
    pts = tmp_path / "p.csv"
    write_matrix_csv(pts, np.array([[0.5, 1.0], [1.0, 1.0]]))
    out = tmp_path / "k.csv"
    assert run("gram", "--kernel", "poly", "--degree", 2, "--dim", 2, "--points", pts, "--out", out) == 0
    assert read_matrix_csv(out)[0, 1] == pytest.approx(2.25)


def test_divergence_json_schema(tmp_path, covs):
    a, b = covs
    out = tmp_path / "r.json"
    assert run("divergence", "--a", a, "--b", b, "--epsilon", "0.1,0.5", "--out", out) == 0
    data = json.loads(out.read_text())
    assert set(data) == {"w2_sq", "ot_eps", "sinkhorn", "hs_sq"}
    assert set(data["sinkhorn"]) == {eps_key(0.1), eps_key(0.5)}
    ref = divergence_report(read_matrix_csv(a), read_matrix_csv(b), [0.1, 0.5])
    assert data["sinkhorn"]["0.1"] == ref.sinkhorn[0.1]
    assert data["w2_sq"] == ref.w2_sq


def test_divergence_with_means(tmp_path, covs):
    a, b = covs
    ma, mb = tmp_path / "ma.csv", tmp_path / "mb.csv"
    ma.write_text("1\n0\n0\n0\n")
    mb.write_text("0\n0\n0\n0\n")
    out0, out1 = tmp_path / "r0.json", tmp_path / "r1.json"
    assert run("divergence", "--a", a, "--b", b, "--epsilon", "0.5", "--out", out0) == 0
    assert run("divergence", "--a", a, "--b", b, "--epsilon", "0.5", "--mean-a", ma, "--mean-b", mb, "--out", out1) == 0
    d0, d1 = json.loads(out0.read_text()), json.loads(out1.read_text())
    assert d1["w2_sq"] == pytest.approx(d0["w2_sq"] + 1.0, rel=1e-12)


def test_divergence_stdout(covs, capsys):
    a, b = covs
    assert run("divergence", "--a", a, "--b", b, "--epsilon", "0.5") == 0
    assert "sinkhorn" in json.loads(capsys.readouterr().out)


def test_simulate_files(tmp_path):
    prefix = tmp_path / "p1"
    assert run("simulate", "--kernel", "exp", "--param", 1, "--m", 12, "--n", 30, "--seed", 4, "--out", prefix) == 0
    z = read_matrix_csv(tmp_path / "p1.z.csv")
    x = read_matrix_csv(tmp_path / "p1.points.csv")
    meta = json.loads((tmp_path / "p1.json").read_text())
    assert z.shape == (12, 30) and x.shape == (12, 1)
    assert meta == {
        "d": 1,
        "m": 12,
        "N": 30,
        "kernel": {"kind": "exp", "dim": 1, "param": 1.0},
        "seed": 4,
        "innovation": "gaussian",
    }


def test_simulate_and_estimate(tmp_path):
    pa, pb = tmp_path / "a", tmp_path / "b"
    assert run("simulate", "--kernel", "exp", "--param", 1, "--m", 10, "--n", 50, "--seed", 1, "--out", pa) == 0
    assert (
        run("simulate", "--kernel", "se", "--param", 0.1, "--points", f"{pa}.points.csv", "--n", 60, "--seed", 2, "--innovation", "uniform", "--out", pb)
        == 0
    )
    out = tmp_path / "e.json"
    assert run("estimate", "--za", f"{pa}.z.csv", "--zb", f"{pb}.z.csv", "--epsilon", "0.1,0.5", "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["sinkhorn"]["0.5"] > 0


def test_estimate_grid_mismatch(tmp_path):
    pa, pb = tmp_path / "a", tmp_path / "b"
    run("simulate", "--kernel", "exp", "--param", 1, "--m", 10, "--n", 5, "--seed", 1, "--out", pa)
    run("simulate", "--kernel", "exp", "--param", 1, "--m", 10, "--n", 5, "--seed", 2, "--out", pb)
    assert run("estimate", "--za", f"{pa}.z.csv", "--zb", f"{pb}.z.csv", "--epsilon", "0.5") == 2


def test_experiment_csv(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m_grid": [5, 10], "trials": 2, "eps_list": [0.5]}))
    out = tmp_path / "r.csv"
    assert run("experiment", "--config", cfg, "--out", out) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == RESULT_HEADER
    assert len(rows) == 1 + 2 * 2 * 3


def test_experiment_jobs_identical(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "sample_sweep", "m_grid": [8], "N_grid": [5, 10], "trials": 3}))
    o1, o2 = tmp_path / "1.csv", tmp_path / "2.csv"
    assert run("experiment", "--config", cfg, "--out", o1, "--jobs", 1) == 0
    assert run("experiment", "--config", cfg, "--out", o2, "--jobs", 3) == 0
    assert o1.read_bytes() == o2.read_bytes()


def test_bound(capsys):
    code = run(
        "bound", "--id", "thm_4_5_gram_bounded", "--kappa1-sq", 1, "--kappa2-sq", 1,
        "--m", 1000, "--epsilon", 0.1, "--delta", 0.5,
    )
    assert code == 0
    assert float(capsys.readouterr().out) == pytest.approx(18.11, abs=5e-3)


def test_bound_hs(capsys):
    code = run(
        "bound", "--id", "thm_2_2_hs_continuity", "--epsilon", 0.2, "--hs-a-n", 1.5, "--hs-a", 1.2,
        "--hs-b", 0.7, "--hs-diff-a", 0.3, "--hs-diff-b", 0.1,
    )
    assert code == 0
    assert float(capsys.readouterr().out) == pytest.approx(25.8, rel=1e-14)


class TestExitCodes:
    def test_missing_parameter(self):
        assert run("bound", "--id", "thm_6_1_w2_gram", "--kappa1-sq", 1, "--kappa2-sq", 1, "--m", 10, "--delta", 0.5) == 2

    def test_bad_delta(self):
        args = ("--kappa1-sq", 1, "--kappa2-sq", 1, "--m", 10, "--epsilon", 0.1, "--delta", 2)
        assert run("bound", "--id", "thm_4_5_gram_bounded", *args) == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as e:
            run("frobnicate")
        assert e.value.code == 2

    def test_bad_epsilon_list(self, covs):
        a, b = covs
        with pytest.raises(SystemExit) as e:
            run("divergence", "--a", a, "--b", b, "--epsilon", "x")
        assert e.value.code == 2

    def test_negative_epsilon(self, covs):
        a, b = covs
        assert run("divergence", "--a", a, "--b", b, "--epsilon", "-1") == 2

    def test_missing_file(self, tmp_path, covs):
        a, _ = covs
        assert run("divergence", "--a", a, "--b", tmp_path / "nope.csv", "--epsilon", "1") == 2

    def test_not_psd(self, tmp_path, covs):
        a, _ = covs
        bad = tmp_path / "bad.csv"
        write_matrix_csv(bad, -np.eye(4))
        assert run("divergence", "--a", a, "--b", bad, "--epsilon", "1") == 2

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"m_grid": [10, 5]}))
        assert run("experiment", "--config", cfg) == 2

    def test_simulate_needs_sites(self, tmp_path):
        assert run("simulate", "--kernel", "se", "--param", 0.1, "--n", 3, "--out", tmp_path / "p") == 2

    def test_numerical_failure(self, tmp_path, monkeypatch):
        from gpot import cli
        from gpot.errors import NumericalInconsistency

        def boom(*a, **k):
            raise NumericalInconsistency("negative divergence")

        monkeypatch.setattr(cli, "divergence_report", boom)
        a = tmp_path / "a.csv"
        write_matrix_csv(a, np.eye(2))
        assert run("divergence", "--a", a, "--b", a, "--epsilon", "1") == 3


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "gpot", "bound", "--id", "thm_5_1_cov_est", "--kappa1-sq", "1",
         "--kappa2-sq", "1", "--n", "100", "--epsilon", "0.5", "--delta", "0.5"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and float(res.stdout) > 0
