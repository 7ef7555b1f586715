"""Gain sweep: decay table, CSV outputs and gnuplot scripts."""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .config import SweepSpec
from .decay import DecayReport, lyapunov_exponent, theoretical_rate
from .errors import ReactorError
from .model import ClosedLoopSetup, Profile, initial_data, m_star, phi
from .pde_sim import simulate
from .spectral import principal_eigenvalue
from .steady_state import solve_steady

log = logging.getLogger(__name__)

TABLE_COLUMNS = ("alpha", "lambda_num", "lambda0", "L", "lambda_T", "certificate", "omega")


@dataclass
class SweepRow:
    alpha: float
    report: Optional[DecayReport]
    norm_curve_path: str
    error: Optional[str] = None
    meta: dict = field(default_factory=dict)


@dataclass
class _AlphaResult:
    alpha: float
    report: Optional[DecayReport] = None
    times: Optional[np.ndarray] = None
    norms: Optional[np.ndarray] = None
    error: Optional[str] = None
    meta: dict = field(default_factory=dict)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return format(float(x), ".12g")


def alpha_label(alpha: float) -> str:
    return format(float(alpha), "g")


def setup_for(spec: SweepSpec, alpha: float, lambda0_max: float) -> ClosedLoopSetup:
    """Closed loop at ``alpha`` with M = mu M*(alpha) unless M was given."""
    if spec.m_amplitude is not None:
        M = float(spec.m_amplitude)
    else:
        M = spec.init.mu * m_star(spec.params, alpha, spec.init, lambda0_max)
    return ClosedLoopSetup(spec.params, alpha, M)


def steady_guess(setup: ClosedLoopSetup, grid, kind: str) -> Profile:
    if kind == "zero":
        return Profile.zeros(grid)
    if kind == "phi":
        return Profile(grid, setup.m_amplitude * phi(setup, grid.x))
    raise ValueError(f"unknown guess kind {kind!r}")


def run_alpha(spec: SweepSpec, alpha: float, lambda0_max: float) -> _AlphaResult:
    out = _AlphaResult(alpha)
    try:
        setup = setup_for(spec, alpha, lambda0_max)
        grid = spec.sim.grid
        lam0 = principal_eigenvalue(spec.params, alpha).lam
        xi0 = initial_data(setup.with_(m_amplitude=1.0), spec.init, lambda0_max, grid)
        steady = solve_steady(setup, steady_guess(setup, grid, spec.guess))
        rec = simulate(setup, steady.profile, xi0, spec.sim)
        fit = lyapunov_exponent(rec, spec.fit_window)
        out.report = theoretical_rate(setup, lam0).with_lambda_num(fit.slope)
        out.times = rec.times
        out.norms = rec.norms / rec.norms[0]
        out.meta = {
            "M": setup.m_amplitude,
            "steady_branch": steady.branch,
            "steady_guess": spec.guess,
            "steady_residual": steady.residual_norm,
            "invariant_violations": rec.invariant_violations,
            "halted_early": rec.halted_early,
            "fit_residual_rms": fit.residual_rms,
            "samples": int(rec.times.size),
        }
    except (ReactorError, ValueError, ArithmeticError) as exc:
        log.warning("alpha=%s failed: %s", alpha, exc)
        out.error = f"{type(exc).__name__}: {exc}"
    return out


def _run_alpha_args(args):
    return run_alpha(*args)


def run_sweep(spec: SweepSpec, write: bool = True) -> list:
    """Run the pipeline for every gain; failures stay confined to their row."""
    lambda0_max = principal_eigenvalue(spec.params, spec.init.alpha_max).lam
    jobs = [(spec, a, lambda0_max) for a in spec.alphas]
    workers = spec.workers or os.cpu_count() or 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_alpha_args, jobs))
    else:
        results = [_run_alpha_args(j) for j in jobs]

    rows = [
        SweepRow(r.alpha, r.report, f"norms_{alpha_label(r.alpha)}.csv", r.error, r.meta)
        for r in results
    ]
    if write:
        write_outputs(spec, results, rows, lambda0_max)
    return rows


def write_outputs(spec: SweepSpec, results, rows, lambda0_max: float):
    out = Path(spec.outputs)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "table1.csv", "w", newline="\n") as fh:
        fh.write(",".join(TABLE_COLUMNS) + "\n")
        for row in rows:
            r = row.report
            if r is None:
                fh.write(f"{fmt(row.alpha)},,,,,failed,\n")
                continue
            fh.write(",".join([
                fmt(r.alpha), fmt(r.lambda_num), fmt(r.lambda0), fmt(r.lipschitz_L),
                fmt(r.lambda_T), fmt(r.certificate_holds), fmt(r.omega),
            ]) + "\n")
    with open(out / "decay_vs_alpha.csv", "w", newline="\n") as fh:
        fh.write("alpha,lambda_num,lambda0,lambda_T\n")
        for row in rows:
            if row.report is not None:
                r = row.report
                fh.write(f"{fmt(r.alpha)},{fmt(r.lambda_num)},{fmt(r.lambda0)},{fmt(r.lambda_T)}\n")
    for res, row in zip(results, rows):
        if res.times is None:
            continue
        write_norms(out / row.norm_curve_path, res.times, res.norms)
    meta = {
        "params": spec.values,
        "lambda0_alpha_max": lambda0_max,
        "fit_window": spec.fit_window,
        "rows": [
            {"alpha": row.alpha, "error": row.error, **row.meta} for row in rows
        ],
    }
    (out / "sweep_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    emit_plots(rows, out)


def write_norms(path, times, norms):
    with open(path, "w", newline="\n") as fh:
        fh.write("t,l2_norm\n")
        for t, n in zip(times, norms):
            fh.write(f"{fmt(t)},{fmt(n)}\n")


def emit_plots(rows, outputs) -> list:
    """Write gnuplot scripts for the norm curves and decay-vs-gain plots.

    Scripts refer to the CSVs by bare file name and must be run from
    ``outputs``.
    """
    if not rows:
        raise ValueError("no rows to plot")
    out = Path(outputs)
    curves = [r for r in rows if r.report is not None]
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        "set output 'fig1_norms.png'",
        "set logscale y",
        "set xlabel 't [s]'",
        "set ylabel '||xi(t)|| / ||xi_0||'",
    ]
    plots = [
        f"'{r.norm_curve_path}' every ::1 using 1:2 with lines title 'alpha={alpha_label(r.alpha)}'"
        for r in curves
    ]
    lines.append("plot " + ", \\\n     ".join(plots) if plots else "# no successful rows")
    fig1 = out / "fig1_norms.gp"
    fig1.write_text("\n".join(lines) + "\n")

    fig2 = out / "fig2_decay.gp"
    fig2.write_text("\n".join([
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        "set output 'fig2_decay.png'",
        "set xlabel 'alpha'",
        "set ylabel 'decay rate [1/s]'",
        "plot 'decay_vs_alpha.csv' every ::1 using 1:(-$2) with linespoints title '-lambda_Num', \\",
        "     'decay_vs_alpha.csv' every ::1 using 1:(-$3) with linespoints title '-lambda_0', \\",
        "     'decay_vs_alpha.csv' every ::1 using 1:(-$4) with linespoints title '-lambda_T'",
    ]) + "\n")
    return [fig1, fig2]
