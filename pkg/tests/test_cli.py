"""Command-line plumbing. The numerics behind each subcommand are
oracle-tested in the module tests; here we check wiring, formats, and
exit codes. Most tests drive main() in process; two subprocess tests
cover the `python -m swd.cli` entry.
"""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from swd.cli import main
from swd.harness import CSV_HEADER
from swd.rmt import read_matrix

L_ZERO_64 = -9.949766918922528  # 64x64 zero matrix, omega 0.5, goe moments


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def zero_matrix_file(tmp_path, n=64):
    path = tmp_path / "zero.mat"
    rc = main(["simulate", "--n", str(n), "--noise", "none",
               "--seed", "1", "--out", str(path)])
    assert rc == 0
    return str(path)


def test_simulate_all_ones_rank_one(tmp_path, capsys):
    path = tmp_path / "m.mat"
    rc, _, _ = run_cli(
        capsys, "simulate", "--n", "8", "--omega", "1", "--noise", "none",
        "--prior", "all-ones", "--seed", "3", "--out", str(path),
    )
    assert rc == 0
    m = read_matrix(str(path))
    np.testing.assert_allclose(m.entries, np.full((8, 8), 0.125), rtol=1e-12)


def test_detect_zero_matrix_accepts(tmp_path, capsys):
    path = zero_matrix_file(tmp_path)
    capsys.readouterr()
    rc, out, _ = run_cli(
        capsys, "detect", "--matrix", path, "--omega", "0.5",
        "--w2", "2", "--w4", "3",
    )
    assert rc == 0
    report = json.loads(out)
    assert set(report) == {
        "statistic", "critical", "decision", "signal_certain",
        "theoretical_error",
    }
    assert report["statistic"] == pytest.approx(L_ZERO_64, rel=1e-12)
    assert report["critical"] == pytest.approx(math.log(2.0), rel=1e-12)
    assert report["decision"] == "accept_h0"
    assert report["signal_certain"] is False


def test_detect_planted_spike_is_certain(tmp_path, capsys):
    path = tmp_path / "spiked.mat"
    main(["simulate", "--n", "64", "--omega", "9", "--noise", "none",
          "--prior", "all-ones", "--seed", "3", "--out", str(path)])
    capsys.readouterr()
    rc, out, _ = run_cli(
        capsys, "detect", "--matrix", str(path), "--omega", "0.5",
        "--w2", "2", "--w4", "3",
    )
    assert rc == 1
    report = json.loads(out)
    assert report["decision"] == "reject_h0"
    assert report["signal_certain"] is True
    assert report["statistic"] is None


def test_detect_moment_flags_are_exclusive(tmp_path, capsys):
    path = zero_matrix_file(tmp_path)
    capsys.readouterr()
    rc, _, err = run_cli(capsys, "detect", "--matrix", path, "--omega", "0.5")
    assert rc == 2 and err.startswith("error:")
    rc, _, err = run_cli(
        capsys, "detect", "--matrix", path, "--omega", "0.5",
        "--w2", "2", "--w4", "3", "--estimate",
    )
    assert rc == 2 and err.startswith("error:")


def test_detect_with_estimated_moments(tmp_path, capsys):
    path = tmp_path / "g.mat"
    main(["simulate", "--n", "64", "--noise", "goe", "--seed", "5",
          "--out", str(path)])
    capsys.readouterr()
    rc, out, _ = run_cli(
        capsys, "detect", "--matrix", str(path), "--omega", "0.3", "--estimate",
    )
    assert rc in (0, 1)
    report = json.loads(out)
    assert isinstance(report["critical"], float)


def test_detect_missing_file(capsys):
    rc, _, err = run_cli(
        capsys, "detect", "--matrix", "/no/such/file", "--omega", "0.5",
        "--w2", "2", "--w4", "3",
    )
    assert rc == 2
    assert err.startswith("error:")


def test_detect_complex_flag_must_match_data(tmp_path, capsys):
    path = zero_matrix_file(tmp_path)
    capsys.readouterr()
    rc, _, err = run_cli(
        capsys, "detect", "--matrix", path, "--omega", "0.5",
        "--w2", "1", "--w4", "2", "--complex",
    )
    assert rc == 2
    assert "matrix is real" in err


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as ei:
        main(["frobnicate"])
    assert ei.value.code == 2


def test_detect_transformed_subcritical(tmp_path, capsys):
    path = zero_matrix_file(tmp_path)
    capsys.readouterr()
    rc, out, _ = run_cli(
        capsys, "detect", "--matrix", path, "--omega", "0.5",
        "--w2", "1", "--w4", "3", "--density", "sech",
    )
    assert rc == 0
    report = json.loads(out)
    assert report["signal_certain"] is False
    assert report["theoretical_error"] == pytest.approx(0.6571350381449108, rel=1e-12)


def test_detect_transformed_supercritical_edge(tmp_path, capsys):
    # omega * F = 0.9 * pi^2 / 8 > 1: falls back to the eigenvalue test
    path = zero_matrix_file(tmp_path)
    capsys.readouterr()
    rc, out, _ = run_cli(
        capsys, "detect", "--matrix", path, "--omega", "0.9",
        "--w2", "1", "--w4", "3", "--density", "sech",
    )
    assert rc == 0
    report = json.loads(out)
    s = 0.9 * math.pi**2 / 8.0
    assert report["statistic"] == 0.0
    assert report["critical"] == pytest.approx(
        0.5 * (2.0 + math.sqrt(s) + 1.0 / math.sqrt(s)), rel=1e-12
    )
    assert report["theoretical_error"] == 0.0


def test_error_curve_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(
        "n = 32\nomegas = 0, 0.5\ntrials = 100\nseed = 1\nnoise = goe\n"
    )
    out_path = tmp_path / "curve.csv"
    rc, _, _ = run_cli(
        capsys, "error-curve", "--config", str(cfg), "--out", str(out_path),
    )
    assert rc == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    zero_row = lines[1].split(",")
    assert zero_row[0] == "0" and zero_row[6] == "0"  # omega, trials


def test_error_curve_finds_bundled_config(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out_path = tmp_path / "goe.csv"
    rc, _, _ = run_cli(
        capsys, "error-curve", "--config", "goe.cfg", "--out", str(out_path),
    )
    assert rc == 0
    assert len(out_path.read_text().splitlines()) == 9


def test_error_curve_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 32\nomegas = 0.5\ntrials = 100\nseed = 1\nnoise = goe\nn = 16\n")
    rc, _, err = run_cli(capsys, "error-curve", "--config", str(cfg))
    assert rc == 2
    assert "duplicate" in err


def test_error_curve_missing_config(capsys):
    rc, _, err = run_cli(capsys, "error-curve", "--config", "nonexistent.cfg")
    assert rc == 2
    assert err.startswith("error:")


def test_adaptive_uniform_prior(capsys):
    rc, out, _ = run_cli(capsys, "adaptive", "--w2", "2", "--w4", "3")
    assert rc == 0
    report = json.loads(out)
    assert report["t_star"] == pytest.approx(0.6709505197527198, abs=1e-6)
    assert report["average_error"] == pytest.approx(0.7716046525458586, abs=1e-9)
    assert report["flagged"] is False
    assert report["evaluations"] > 20


def test_adaptive_sweep_file(tmp_path, capsys):
    sweep = tmp_path / "sweep.csv"
    rc, out, _ = run_cli(
        capsys, "adaptive", "--w2", "2", "--w4", "3", "--sweep", str(sweep),
    )
    assert rc == 0
    lines = sweep.read_text().splitlines()
    assert lines[0] == "t,average_error"
    assert len(lines) == 101
    ts = [float(row.split(",")[0]) for row in lines[1:]]
    errs = [float(row.split(",")[1]) for row in lines[1:]]
    assert ts[0] == 0.005 and ts[-1] == 0.995
    best = json.loads(out)["average_error"]
    assert best <= min(errs) + 1e-9
    assert min(errs) <= best + 1e-3


def test_adaptive_rejects_w4_one(capsys):
    rc, _, err = run_cli(capsys, "adaptive", "--w2", "2", "--w4", "1")
    assert rc == 2
    assert "exceptional" in err


def test_clt_check_phi(capsys):
    rc, out, _ = run_cli(
        capsys, "clt-check", "--f", "phi:0.36", "--w2", "2", "--w4", "3",
    )
    assert rc == 0
    report = json.loads(out)
    tau = report["tau"]
    assert len(tau) == 9
    assert tau[0] == pytest.approx(0.0, abs=1e-10)
    assert tau[1] == pytest.approx(0.6, rel=1e-8)
    assert tau[2] == pytest.approx(0.18, rel=1e-8)
    assert tau[3] == pytest.approx(0.072, rel=1e-8)
    assert tau[4] == pytest.approx(0.0324, rel=1e-8)
    assert report["mean"] == pytest.approx(-0.5 * math.log(0.64), rel=1e-10)
    assert report["variance"] == pytest.approx(-2.0 * math.log(0.64), rel=1e-10)


def test_clt_check_poly(capsys):
    rc, out, _ = run_cli(
        capsys, "clt-check", "--f", "poly:0,1", "--w2", "2", "--w4", "3",
    )
    report = json.loads(out)
    assert rc == 0
    assert report["mean"] == pytest.approx(0.0, abs=1e-10)
    assert report["variance"] == pytest.approx(2.0, rel=1e-10)
    rc, out, _ = run_cli(
        capsys, "clt-check", "--f", "poly:5", "--w2", "2", "--w4", "3",
    )
    assert json.loads(out)["variance"] == pytest.approx(0.0, abs=1e-12)


def test_transform_compare_tags_supercritical(tmp_path, capsys):
    cfg = tmp_path / "tc.cfg"
    cfg.write_text(
        "n = 32\nomegas = 0.2, 0.9\ntrials = 100\nseed = 2\nnoise = sech\n"
    )
    out_path = tmp_path / "cmp.csv"
    rc, _, _ = run_cli(
        capsys, "transform-compare", "--config", str(cfg), "--out", str(out_path),
    )
    assert rc == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == (
        "omega,err_plain,theory_plain,stderr_plain,"
        "err_transformed,theory_transformed,stderr_transformed,tag"
    )
    assert len(lines) == 3
    assert lines[1].endswith(",")
    assert lines[2].endswith(",ReliablyDetectable")


def test_module_entry_byte_stable():
    cmd = [sys.executable, "-m", "swd.cli", "simulate", "--n", "16",
           "--omega", "0.4", "--noise", "goe", "--seed", "9"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout
    assert a.stdout.decode().count("\n") == 17  # header plus one line per row


def test_module_entry_usage_error():
    out = subprocess.run(
        [sys.executable, "-m", "swd.cli", "detect", "--bogus"],
        capture_output=True,
    )
    assert out.returncode == 2
