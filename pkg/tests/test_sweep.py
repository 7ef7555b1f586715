import csv
import io

import numpy as np
import pytest

from tubular_feedback import sweep as sweep_mod
from tubular_feedback.cli import EXIT_PARTIAL, main
from tubular_feedback.config import DEFAULT_ALPHAS, load_config
from tubular_feedback.errors import InvalidSpectrum
from tubular_feedback.sweep import TABLE_COLUMNS, SweepRow, emit_plots, run_sweep

SMALL = {"nx": 41, "t_final": 300.0, "workers": 1}


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_default_sweep_outputs(default_sweep):
    spec, rows, out = default_sweep
    assert [r.alpha for r in rows] == list(DEFAULT_ALPHAS)
    table = read_csv(out / "table1.csv")
    assert len(table) == 6
    assert tuple(table[0].keys()) == TABLE_COLUMNS
    for row in rows:
        norms = np.loadtxt(out / row.norm_curve_path, delimiter=",", skiprows=1)
        assert norms[0, 1] == 1.0
        assert np.all(norms[1:, 1] <= 1.0)
    neg = [-float(r["lambda0"]) for r in table]
    assert np.all(np.diff(neg) < 0)
    for name in ("decay_vs_alpha.csv", "sweep_meta.json", "fig1_norms.gp", "fig2_decay.gp"):
        assert (out / name).exists()


def test_single_alpha_sweep(tmp_path):
    spec = load_config(None, {**SMALL, "alphas": [0.5], "outputs": tmp_path})
    rows = run_sweep(spec)
    assert len(rows) == 1 and rows[0].error is None
    assert len(read_csv(tmp_path / "table1.csv")) == 1
    assert (tmp_path / "norms_0.5.csv").exists()


def test_failure_stays_in_its_row(tmp_path, monkeypatch):
    real = sweep_mod.principal_eigenvalue

    def flaky(params, alpha):
        if alpha == 0.5:
            raise InvalidSpectrum("planted failure")
        return real(params, alpha)

    monkeypatch.setattr(sweep_mod, "principal_eigenvalue", flaky)
    spec = load_config(None, {**SMALL, "alphas": [0.0, 0.5, 0.75], "outputs": tmp_path})
    rows = run_sweep(spec)
    assert [r.error is None for r in rows] == [True, False, True]
    table = read_csv(tmp_path / "table1.csv")
    assert table[1]["certificate"] == "failed"
    assert table[2]["lambda0"] != ""
    code = main(["sweep", "--alphas", "0,0.5,0.75", "--nx", "41", "--tfinal", "300",
                 "--workers", "1", "--out", str(tmp_path / "cli")], out=io.StringIO())
    assert code == EXIT_PARTIAL


def test_parallel_matches_serial(tmp_path):
    base = {"nx": 41, "t_final": 200.0, "alphas": [0.0, 0.9]}
    a = run_sweep(load_config(None, {**base, "workers": 1, "outputs": tmp_path / "a"}))
    b = run_sweep(load_config(None, {**base, "workers": 2, "outputs": tmp_path / "b"}))
    assert [r.alpha for r in a] == [r.alpha for r in b]
    assert (tmp_path / "a" / "table1.csv").read_bytes() == (tmp_path / "b" / "table1.csv").read_bytes()


def test_emit_plots_single_row(tmp_path):
    rows = [SweepRow(0.5, None, "norms_0.5.csv")]
    rows[0].report = object()
    fig1, fig2 = emit_plots(rows, tmp_path)
    text = fig1.read_text()
    assert "'norms_0.5.csv'" in text and str(tmp_path) not in text
    assert "'decay_vs_alpha.csv'" in fig2.read_text()
    with pytest.raises(ValueError):
        emit_plots([], tmp_path)
