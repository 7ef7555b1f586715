"""Steady state of the closed-loop reactor by damped Newton iteration."""

from dataclasses import dataclass

import numpy as np

from . import fd
from .errors import NegativeBase, NoConvergence, SingularJacobian, SingularMatrix
from .model import ClosedLoopSetup, Profile
from .numerics import solve_tridiagonal

ACCEPT_FLOOR = -1e-12
MAX_HALVINGS = 20
ZERO_PROFILE_TOL = 1e-9


@dataclass(frozen=True)
class SteadyStateResult:
    profile: Profile
    residual_norm: float
    iterations: int
    converged: bool

    @property
    def branch(self) -> str:
        """'zero' for the trivial steady state, 'nontrivial' otherwise."""
        return "zero" if np.max(np.abs(self.profile.values)) < ZERO_PROFILE_TOL else "nontrivial"


def _is_integer(n) -> bool:
    return float(n).is_integer()


def _power(c, n):
    if _is_integer(n):
        return c ** int(n)
    if np.any(c < 0):
        raise NegativeBase("fractional reaction order with negative concentration")
    return c**n


def steady_residual(setup: ClosedLoopSetup, p: Profile) -> np.ndarray:
    """Discrete residual of D C'' - v C' - k C^n = 0 with closed-loop boundaries.

    Entry 0 is the inlet relation, entry N-1 the outlet relation, the rest
    are interior balances.
    """
    par = setup.params
    u = p.values
    h = p.grid.spacing
    res = np.empty_like(u)
    res[1:-1] = fd.apply_interior(par, u, h) - par.k * _power(u[1:-1], par.n)
    res[0] = fd.inlet_residual(par, setup.alpha, u, h)
    res[-1] = fd.outlet_residual(u, h)
    return res


def _interior_residual(par, bands, c):
    lower, diag, upper = bands
    return fd.band_matvec(lower, diag, upper, c) - par.k * _power(c, par.n)


def _trial_residual(par, bands, c):
    # line-search trials only: clamp before the power
    if not _is_integer(par.n):
        c = np.maximum(c, 0.0)
    return _interior_residual(par, bands, c)


def solve_steady(setup: ClosedLoopSetup, guess: Profile, tol: float = 1e-10,
                 max_iter: int = 50) -> SteadyStateResult:
    """Newton iteration on the interior unknowns.

    The Jacobian is the reduced linear operator minus k n C^(n-1) on the
    diagonal. ``iterations`` counts passes through the convergence check,
    so a guess that is already converged reports one iteration.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    par = setup.params
    grid = guess.grid
    bands = fd.reduced_bands(par, setup.alpha, grid)
    cl = fd.closure(par, setup.alpha, grid.spacing)
    c = guess.values[1:-1].copy()
    lower, diag, upper = bands

    def full_norm(ci):
        return float(np.max(np.abs(steady_residual(setup, Profile(grid, cl.expand(ci))))))

    for it in range(1, max_iter + 1):
        res = _interior_residual(par, bands, c)
        if full_norm(c) < tol:
            return SteadyStateResult(Profile(grid, cl.expand(c)), full_norm(c), it, True)
        jac_diag = diag - par.k * par.n * _power(c, par.n - 1)
        try:
            step = solve_tridiagonal(lower, jac_diag, upper, -res)
        except SingularMatrix as exc:
            raise SingularJacobian(str(exc)) from exc
        base = float(np.max(np.abs(res)))
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = c + lam * step
            if np.min(trial) >= ACCEPT_FLOOR:
                trial_norm = float(np.max(np.abs(_trial_residual(par, bands, trial))))
                if trial_norm < base:
                    break
            lam *= 0.5
        else:
            raise NoConvergence(f"line search failed at iteration {it}")
        c = trial
    norm = full_norm(c)
    if norm < tol:
        return SteadyStateResult(Profile(grid, cl.expand(c)), norm, max_iter, True)
    raise NoConvergence(f"residual {norm:.3e} after {max_iter} Newton steps")
