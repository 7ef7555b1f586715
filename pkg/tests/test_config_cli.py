import io
import json

import numpy as np
import pytest

from tubular_feedback.cli import EXIT_FATAL, EXIT_OK, main
from tubular_feedback.config import DEFAULT_ALPHAS, load_config, parse_config_text
from tubular_feedback.errors import ParseError, UnknownKey


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


# -- config ------------------------------------------------------------------

def test_defaults():
    spec = load_config()
    p = spec.params
    assert (p.D, p.v, p.l, p.k, p.n) == (0.0025, 0.01, 1.0, 0.001, 2.0)
    assert spec.init.mu == 0.9 and spec.init.alpha_max == 0.95
    assert spec.sim.grid.n_points == 201 and spec.sim.dt == 0.05 and spec.sim.t_final == 2000.0
    assert spec.alphas == DEFAULT_ALPHAS


def test_flag_overrides_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nalpha = 0.5\nD = 0.004  # trailing\n")
    spec = load_config(cfg, {"alpha": 0.0})
    assert spec.alpha == 0.0 and spec.alphas == (0.0,)
    assert spec.params.D == 0.004
    assert load_config(cfg).alphas == (0.5,)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_config_text("D 0.0025\n")
    assert exc.value.line == 1
    assert str(exc.value).startswith("line 1")
    with pytest.raises(ParseError) as exc:
        parse_config_text("D = 1\nv = fast\n")
    assert exc.value.line == 2


def test_unknown_key():
    with pytest.raises(UnknownKey):
        parse_config_text("velocity = 1\n")
    with pytest.raises(UnknownKey):
        load_config(None, {"bogus": 1})


def test_sweep_spec_rejects_bad_alpha_lists():
    for alphas in ([], [0.0, 0.0], [0.5, 1.0]):
        with pytest.raises(ValueError):
            load_config(None, {"alphas": alphas})


# -- CLI ---------------------------------------------------------------------

def test_cli_spectrum():
    code, text = run(["spectrum", "--alpha", "0", "--num-eigs", "3"])
    assert code == EXIT_OK
    lines = text.strip().splitlines()
    assert lines[0] == "k,branch,q,theta,lambda"
    assert len(lines) == 4
    lam0 = float(lines[1].split(",")[-1])
    assert lam0 == pytest.approx(-0.0174, abs=5e-5)


def test_cli_decay_row():
    code, text = run(["decay", "--alpha", "0", "--m", str(2.0 / 1.5)])
    assert code == EXIT_OK
    header, row = text.strip().splitlines()
    assert header == "alpha,lambda_num,lambda0,L,lambda_T,certificate,omega"
    cells = dict(zip(header.split(","), row.split(",")))
    assert cells["lambda_num"] == ""
    assert float(cells["L"]) == pytest.approx(0.004, abs=1e-12)
    assert cells["certificate"] == "true"


def test_cli_steady_stdout_and_out(tmp_path):
    code, text = run(["steady", "--alpha", "0.5", "--nx", "21"])
    assert code == EXIT_OK
    data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
    assert data.shape == (21, 2)
    np.testing.assert_array_equal(data[:, 1], 0.0)
    code, _ = run(["steady", "--alpha", "0.5", "--nx", "21", "--guess", "phi",
                   "--out", str(tmp_path)])
    assert code == EXIT_OK
    meta = json.loads((tmp_path / "steady_0.5.json").read_text())
    assert meta["guess"] == "phi" and meta["branch"] == "zero"


def test_cli_simulate(tmp_path):
    code, _ = run(["simulate", "--alpha", "0.5", "--nx", "21", "--tfinal", "10",
                   "--snapshots", "4", "--out", str(tmp_path)])
    assert code == EXIT_OK
    norms = np.loadtxt(tmp_path / "norms.csv", delimiter=",", skiprows=1)
    assert norms.shape == (201, 2)
    snaps = np.loadtxt(tmp_path / "snapshots.csv", delimiter=",", skiprows=1)
    assert np.unique(snaps[:, 0]).size == 5
    meta = json.loads((tmp_path / "simulate_meta.json").read_text())
    assert meta["invariant_violations"] == 0


def test_cli_errors_exit_fatal(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("D 1\n")
    assert run(["spectrum", "--config", str(bad)])[0] == EXIT_FATAL
    assert "line 1" in capsys.readouterr().err
    assert run(["spectrum", "--alpha", "1.5"])[0] == EXIT_FATAL
    with pytest.raises(SystemExit):
        run(["nonsense"])
