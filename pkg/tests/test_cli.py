"""End-to-end command line tests: artifacts, exit codes, determinism."""

import subprocess
import sys

import numpy as np
import pytest

from conedata.cli import main
from conedata.fields import read_cidf

FAST_SOLVE = """\
[run]
eps0 = 1e-3
[grid]
n = 16
order = 4
[solver]
tol = 1e-5
max_iter = 8
"""


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def _cfg(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return str(p)


def test_seed_writes_artifacts_and_is_deterministic(tmp_path):
    cfg = _cfg(tmp_path, "[grid]\nn = 12\norder = 4\n")
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["seed", "--config", cfg, "--out", str(out)]) == 0
        for art in ("h0.cidf", "pi0.cidf", "seed_decay.csv", "effective-config"):
            assert (out / art).exists()
        outs.append(out)
    for art in ("h0.cidf", "pi0.cidf", "seed_decay.csv", "effective-config"):
        assert (outs[0] / art).read_bytes() == (outs[1] / art).read_bytes()
    h0 = read_cidf(outs[0] / "h0.cidf")
    assert h0.grid.n == 12 and h0.values.shape == (6, 12, 12, 12)


def test_console_script_runs_seed(tmp_path):
    cfg = _cfg(tmp_path, "[grid]\nn = 8\norder = 4\n")
    out = tmp_path / "out"
    res = subprocess.run(
        [sys.executable, "-m", "conedata.cli", "seed", "--config", cfg, "--out", str(out)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert (out / "h0.cidf").exists()


def test_effective_config_round_trips(tmp_path):
    cfg = _cfg(tmp_path, "[run]\ns = 1.5\n[grid]\nn = 10\n")
    out1 = tmp_path / "o1"
    assert main(["seed", "--config", cfg, "--out", str(out1)]) == 0
    out2 = tmp_path / "o2"
    assert main(["seed", "--config", str(out1 / "effective-config"),
                 "--out", str(out2)]) == 0
    assert (out1 / "effective-config").read_bytes() == (out2 / "effective-config").read_bytes()
    assert (out1 / "h0.cidf").read_bytes() == (out2 / "h0.cidf").read_bytes()


@pytest.mark.parametrize("text,msg", [
    ("[grid]\nn = -4\n", "grid"),
    ("[run]\ns = 3.5\n", "s"),
    ("[run]\ns = 0.5\n", "s"),
    ("[run]\neps0 = 0.5\n", "eps0"),
    ("[orbit]\nx = 1\n", "unknown section"),
    ("[run]\nwarp = 9\n", "unknown key"),
    ("[grid]\nn = twelve\n", "cannot parse"),
    ("[grid]\norder = 3\n", "order"),
], ids=["neg-n", "s-high", "s-low", "eps0-high", "bad-section", "bad-key",
        "bad-int", "bad-order"])
def test_config_errors_exit_2(tmp_path, capsys, text, msg):
    cfg = _cfg(tmp_path, text)
    assert main(["seed", "--config", cfg, "--out", str(tmp_path / "out")]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path, capsys):
    rc = main(["seed", "--config", str(tmp_path / "nope.cfg"),
               "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_no_subcommand_prints_help(capsys):
    assert main([]) == 2
    assert "seed" in capsys.readouterr().out


def test_constraints_without_dumps_exits_2(tmp_path, capsys):
    rc = main(["constraints", "--out", str(tmp_path / "empty")])
    assert rc == 2
    assert "run `seed` or `solve` first" in capsys.readouterr().err


def test_zero_amplitude_seed_pipeline(tmp_path, capsys):
    # eps0 = 0 must flow through seed, constraints and sharpness cleanly
    cfg = _cfg(tmp_path, "[run]\neps0 = 0\n[grid]\nn = 12\norder = 4\n")
    out = tmp_path / "out"
    assert main(["seed", "--config", cfg, "--out", str(out)]) == 0
    h0 = read_cidf(out / "h0.cidf")
    assert np.all(h0.values == 0.0)
    assert main(["constraints", "--config", cfg, "--out", str(out)]) == 0
    _, rows = _read_csv(out / "residual.csv")
    # flat-metric curvature is evaluated through the full algebra, so the
    # residual is roundoff rather than exact zero
    assert float(rows[0][0]) < 1e-12 and float(rows[0][1]) < 1e-12
    assert main(["diagnose", "sharpness", "--config", cfg, "--out", str(out)]) == 0
    assert "not applicable" in capsys.readouterr().out


def test_solve_pipeline_and_residual_drop(tmp_path):
    cfg = _cfg(tmp_path, FAST_SOLVE)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    for art in ("iterations.csv", "h1.cidf", "pi1.cidf", "h.cidf", "pi.cidf",
                "g.cidf", "k.cidf", "residual.csv", "seed_residual.csv",
                "norms_h1.csv", "norms_pi1.csv"):
        assert (out / art).exists(), art

    _, rows = _read_csv(out / "iterations.csv")
    assert len(rows) >= 2
    # once a previous update exists, the Picard ratio tracks the seed
    # amplitude scale, orders of magnitude under one
    assert float(rows[1][3]) < 0.1

    _, seed_rows = _read_csv(out / "seed_residual.csv")
    _, conv_rows = _read_csv(out / "residual.csv")
    seed_norm = np.hypot(float(seed_rows[0][0]), float(seed_rows[0][1]))
    conv_norm = np.hypot(float(conv_rows[0][0]), float(conv_rows[0][1]))
    assert conv_norm < seed_norm

    # the dumped correction reproduces the fixed point: h = h0 + h1
    h = read_cidf(out / "h.cidf")
    h0 = read_cidf(out / "h0.cidf") if (out / "h0.cidf").exists() else None
    h1 = read_cidf(out / "h1.cidf")
    if h0 is not None:
        np.testing.assert_allclose(h.values, h0.values + h1.values, atol=1e-15)

    # constraints subcommand prefers the solved pair over the seed pair
    assert main(["constraints", "--config", cfg, "--out", str(out)]) == 0

    # decay diagnostics accept the solve directory and emit fit rows
    assert main(["diagnose", "decay", "--config", cfg, "--out", str(out)]) in (0, 3)
    assert (out / "decay_fits.csv").exists()
    header, fit_rows = _read_csv(out / "decay_fits.csv")
    fields = [r[0] for r in fit_rows]
    assert "h0" in fields and "pi0" in fields and "h1" in fields


def test_solve_overdriven_amplitude_exits_4(tmp_path, capsys):
    cfg = _cfg(tmp_path, "[run]\neps0 = 0.1\n[grid]\nn = 12\norder = 4\n"
                         "[solver]\nmax_iter = 6\n")
    rc = main(["solve", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 4
    assert "solver failure" in capsys.readouterr().err


def test_diagnose_decay_fresh_dir(tmp_path):
    cfg = _cfg(tmp_path, "[run]\ns = 1.5\n")
    out = tmp_path / "out"
    assert main(["diagnose", "decay", "--config", cfg, "--out", str(out)]) == 0
    for art in ("decay_h0.csv", "decay_pi0.csv", "decay_fits.csv"):
        assert (out / art).exists()
    _, rows = _read_csv(out / "decay_fits.csv")
    by_field = {r[0]: r for r in rows}
    assert float(by_field["h0"][1]) == pytest.approx(-0.25, abs=0.05)
    assert float(by_field["pi0"][1]) == pytest.approx(-1.25, abs=0.05)
    assert by_field["h0"][3] == "1" and by_field["pi0"][3] == "1"


def test_diagnose_sharpness_artifacts(tmp_path):
    out = tmp_path / "out"
    assert main(["diagnose", "sharpness", "--out", str(out)]) == 0
    for name in ("sharpness_s.csv", "sharpness_s_plus_1.csv"):
        header, rows = _read_csv(out / name)
        assert header == ["R_lo", "R_hi", "increment"]
        assert len(rows) >= 5
    _, conv = _read_csv(out / "sharpness_s.csv")
    incs = np.array([float(r[2]) for r in conv])
    assert (np.diff(incs) < 0).all()
    _, div = _read_csv(out / "sharpness_s_plus_1.csv")
    incs = np.array([float(r[2]) for r in div])
    assert incs[-1] / incs[0] >= 10.0


def test_kernels_verify_passes(tmp_path):
    out = tmp_path / "out"
    assert main(["kernels", "verify", "--out", str(out)]) == 0
    header, rows = _read_csv(out / "kernels_verify.csv")
    assert header == ["check", "value", "threshold", "passed"]
    assert rows and all(r[3] == "1" for r in rows)
    names = [r[0] for r in rows]
    assert "outgoing_zero" in names and "outgoing_negative_control" in names
