"""Command-line front end: spectrum, steady, simulate, decay, sweep."""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import DEFAULT_ALPHAS, SweepSpec, load_config
from .decay import lyapunov_exponent, theoretical_rate
from .errors import ReactorError
from .model import Profile, initial_data, validate
from .pde_sim import SimConfig, simulate
from .spectral import principal_eigenvalue, spectrum
from .steady_state import solve_steady
from .sweep import fmt, run_sweep, setup_for, steady_guess, write_norms

log = logging.getLogger("tubular_feedback")

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--workers", type=int, help="parallel workers (default: all cores)")
    for key in ("D", "v", "l", "k", "n", "mu"):
        p.add_argument(f"--{key}", type=float, dest=key)
    p.add_argument("--alpha-max", type=float, dest="alpha_max")
    p.add_argument("--verbose", action="store_true")


def _sim_flags(p: argparse.ArgumentParser):
    p.add_argument("--nx", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--tfinal", type=float, dest="t_final")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubular-feedback",
        description="Spectra and decay rates of a boundary-controlled tubular reactor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="closed-loop eigenvalues as CSV")
    _common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--num-eigs", type=int, default=1)

    p = sub.add_parser("steady", help="steady-state profile as x,value CSV")
    _common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--nx", type=int)
    p.add_argument("--guess", choices=("zero", "phi", "file"), default="zero")
    p.add_argument("--guess-file", type=Path, help="x,value CSV used with --guess file")

    p = sub.add_parser("simulate", help="integrate the closed loop; writes norms.csv, snapshots.csv")
    _common(p)
    _sim_flags(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--snapshots", type=int, default=10, help="number of stored snapshots")
    p.add_argument("--guess", choices=("zero", "phi"), default="zero")

    p = sub.add_parser("decay", help="one decay-report row as CSV")
    _common(p)
    _sim_flags(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--m", type=float, help="invariant-set amplitude M (default mu*M*)")
    p.add_argument("--simulate", action="store_true", help="also fit lambda_Num")
    p.add_argument("--fit-window", type=float, default=0.5)

    p = sub.add_parser("sweep", help="gain sweep: decay table, norm curves and plot scripts")
    _common(p)
    _sim_flags(p)
    p.add_argument("--alphas", type=lambda s: [float(a) for a in s.split(",")])
    p.add_argument("--m", type=float)
    p.add_argument("--fit-window", type=float, default=0.5)
    p.add_argument("--guess", choices=("zero", "phi"), default="zero")
    return parser


def spec_from_args(args) -> SweepSpec:
    keys = ("D", "v", "l", "k", "n", "mu", "alpha_max", "alpha", "nx", "dt", "t_final")
    overrides = {k: getattr(args, k, None) for k in keys}
    for k in ("alphas", "m", "fit_window", "workers"):
        overrides[k] = getattr(args, k, None)
    if getattr(args, "out", None) is not None:
        overrides["outputs"] = args.out
    if getattr(args, "guess", None) in ("zero", "phi"):
        overrides["guess"] = args.guess
    if args.command != "sweep":
        # single-gain commands read spec.alpha; the sweep list is unused
        overrides["alphas"] = DEFAULT_ALPHAS
    return load_config(args.config, overrides)


def cmd_spectrum(args, spec: SweepSpec, out):
    spec_ = spectrum(spec.params, spec.alpha, args.num_eigs)
    out.write("k,branch,q,theta,lambda\n")
    for i, e in enumerate(spec_.eigenvalues):
        out.write(f"{i},{e.branch.value},{fmt(e.q)},{fmt(e.theta)},{fmt(e.lam)}\n")
    return EXIT_OK


def _read_profile_csv(path: Path, grid) -> Profile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Profile(grid, np.interp(grid.x, data[:, 0], data[:, 1]))


def cmd_steady(args, spec: SweepSpec, out):
    lam_max = principal_eigenvalue(spec.params, spec.init.alpha_max).lam
    setup = setup_for(spec, spec.alpha, lam_max)
    grid = spec.sim.grid
    if args.guess == "file":
        if args.guess_file is None:
            raise ValueError("--guess file requires --guess-file")
        guess = _read_profile_csv(args.guess_file, grid)
    else:
        guess = steady_guess(setup, grid, args.guess)
    res = solve_steady(setup, guess)
    log.info("steady: branch=%s guess=%s residual=%.3e iterations=%d",
             res.branch, args.guess, res.residual_norm, res.iterations)
    lines = ["x,value"] + [f"{fmt(x)},{fmt(c)}" for x, c in zip(grid.x, res.profile.values)]
    text = "\n".join(lines) + "\n"
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / f"steady_{format(spec.alpha, 'g')}.csv").write_text(text)
        (args.out / f"steady_{format(spec.alpha, 'g')}.json").write_text(json.dumps(
            {"alpha": spec.alpha, "branch": res.branch, "guess": args.guess,
             "residual_norm": res.residual_norm, "iterations": res.iterations},
            indent=2, sort_keys=True) + "\n")
    else:
        out.write(text)
    return EXIT_OK


def _run_single(spec: SweepSpec, stride=None):
    lam_max = principal_eigenvalue(spec.params, spec.init.alpha_max).lam
    setup = setup_for(spec, spec.alpha, lam_max)
    grid = spec.sim.grid
    xi0 = initial_data(setup.with_(m_amplitude=1.0), spec.init, lam_max, grid)
    steady = solve_steady(setup, steady_guess(setup, grid, spec.guess))
    cfg = spec.sim
    if stride is not None:
        cfg = SimConfig(grid=cfg.grid, dt=cfg.dt, t_final=cfg.t_final, snapshot_stride=stride)
    return setup, steady, simulate(setup, steady.profile, xi0, cfg)


def cmd_simulate(args, spec: SweepSpec, out):
    n_steps = int(round(spec.sim.t_final / spec.sim.dt))
    stride = max(n_steps // max(args.snapshots, 1), 1)
    setup, steady, rec = _run_single(spec, stride)
    dest = args.out or Path(".")
    dest.mkdir(parents=True, exist_ok=True)
    write_norms(dest / "norms.csv", rec.times, rec.norms)
    with open(dest / "snapshots.csv", "w", newline="\n") as fh:
        fh.write("t,x,value\n")
        for t, prof in rec.snapshots:
            for x, val in zip(prof.x, prof.values):
                fh.write(f"{fmt(t)},{fmt(x)},{fmt(val)}\n")
    (dest / "simulate_meta.json").write_text(json.dumps({
        "alpha": spec.alpha, "M": setup.m_amplitude, "steady_branch": steady.branch,
        "steady_guess": spec.guess, "invariant_violations": rec.invariant_violations,
        "halted_early": rec.halted_early, **rec.meta,
    }, indent=2, sort_keys=True) + "\n")
    out.write(f"wrote {dest / 'norms.csv'} and {dest / 'snapshots.csv'}\n")
    return EXIT_OK


def cmd_decay(args, spec: SweepSpec, out):
    lam_max = principal_eigenvalue(spec.params, spec.init.alpha_max).lam
    setup = setup_for(spec, spec.alpha, lam_max)
    report = validate(setup)
    if not report.ok:
        log.warning("stability hypotheses violated: %s", report)
    lam0 = principal_eigenvalue(spec.params, spec.alpha).lam
    row = theoretical_rate(setup, lam0)
    if args.simulate:
        _, _, rec = _run_single(spec)
        row = row.with_lambda_num(lyapunov_exponent(rec, spec.fit_window).slope)
    out.write("alpha,lambda_num,lambda0,L,lambda_T,certificate,omega\n")
    out.write(",".join([fmt(row.alpha), fmt(row.lambda_num), fmt(row.lambda0),
                        fmt(row.lipschitz_L), fmt(row.lambda_T),
                        fmt(row.certificate_holds), fmt(row.omega)]) + "\n")
    return EXIT_OK


def cmd_sweep(args, spec: SweepSpec, out):
    rows = run_sweep(spec)
    failed = [r for r in rows if r.error]
    for r in failed:
        log.error("alpha=%s: %s", r.alpha, r.error)
    out.write(f"wrote {len(rows)} rows to {spec.outputs / 'table1.csv'}\n")
    if not failed:
        return EXIT_OK
    return EXIT_PARTIAL if len(failed) < len(rows) else EXIT_FATAL


COMMANDS = {
    "spectrum": cmd_spectrum,
    "steady": cmd_steady,
    "simulate": cmd_simulate,
    "decay": cmd_decay,
    "sweep": cmd_sweep,
}


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        return COMMANDS[args.command](args, spec, out)
    except (ReactorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
