"""Spectrum of the closed-loop convection-dispersion operator.

With y(x) = exp(-v x / 2D) xi(x) the eigenproblem D xi'' - v xi' = lambda xi
becomes -D y'' = theta y with y'(0) = gamma y(0), y'(l) = -delta y(l), and
lambda = -v^2/(4D) - theta. Three solution families occur:

* trig (theta = D q^2 > 0): (q^2 - delta gamma) tan(q l) = q (gamma + delta)
* zero (theta = 0): only when gamma = -delta / (1 + delta l)
* exponential (theta = -D q^2 < 0): exp(2 q l) = R(q), q in (0, -gamma)
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import numerics
from .errors import InconsistentInput, NoConvergence, Unsupported
from .model import Grid, Profile, ReactorParams

SCAN_FRACTION = 1e-3
POLE_GAP = 1e-9
ZERO_BRANCH_TOL = 1e-10
ALPHA_ONE_TOL = 1e-12
# trig roots below this q*l are the trivial q -> 0 solution, not eigenvalues
TRIVIAL_QL = 1e-7
RESIDUAL_TOL = 1e-9


class Branch(enum.Enum):
    TRIG = "trig"
    ZERO = "zero"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class TransformedBVP:
    gamma: float
    delta: float
    l: float
    D: float

    @property
    def shift(self) -> float:
        """v^2 / (4D), written as D * delta^2."""
        return self.D * self.delta**2


@dataclass(frozen=True)
class Eigenvalue:
    lam: float
    theta: float
    q: float
    branch: Branch


@dataclass(frozen=True)
class Spectrum:
    alpha: float
    eigenvalues: tuple

    @property
    def principal(self) -> Eigenvalue:
        return self.eigenvalues[0]


def critical_alpha(params: ReactorParams) -> float:
    return 0.5 + params.D / (params.v * params.l + 2 * params.D)


def transform(params: ReactorParams, alpha: float) -> TransformedBVP:
    return TransformedBVP(
        gamma=(params.v / params.D) * (0.5 - alpha),
        delta=params.v / (2 * params.D),
        l=params.l,
        D=params.D,
    )


# -- determinant conditions --------------------------------------------------

def trig_determinant(bvp: TransformedBVP, q):
    """Pole-free form (q^2 - delta gamma) sin(ql) - q (gamma + delta) cos(ql)."""
    g, d = bvp.gamma, bvp.delta
    return (q * q - d * g) * np.sin(q * bvp.l) - q * (g + d) * np.cos(q * bvp.l)


def trig_residual(bvp: TransformedBVP, q: float) -> float:
    """Scaled residual of the trig determinant; O(1) coefficients."""
    g, d = bvp.gamma, bvp.delta
    scale = q * q + abs(d * g) + q * abs(g + d)
    return float(abs(trig_determinant(bvp, q)) / scale)


def exp_reduced(bvp: TransformedBVP, q):
    """((q-g)(q-d) - exp(2ql)(q+g)(q+d)) / q, free of the q=0 cancellation.

    Shares the positive zeros of S(q) = R(q) - exp(2ql) on (0, -gamma) and
    has no pole at q = -gamma.
    """
    g, d, l = bvp.gamma, bvp.delta, bvp.l
    q = np.asarray(q, dtype=float)
    # expm1(2ql)/q -> 2l as q -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(q == 0, 2 * l, np.expm1(2 * q * l) / np.where(q == 0, 1, q))
    out = -2 * (g + d) - ratio * (q + g) * (q + d)
    return float(out) if out.ndim == 0 else out


def s_function(bvp: TransformedBVP, q):
    """S(q) = R(q) - exp(2ql) as printed; singular at q = -gamma."""
    g, d, l = bvp.gamma, bvp.delta, bvp.l
    return (q - g) * (q - d) / ((q + g) * (q + d)) - np.exp(2 * q * l)


def exp_residual(bvp: TransformedBVP, q: float) -> float:
    g, d, l = bvp.gamma, bvp.delta, bvp.l
    num = (q - g) * (q - d) - math.exp(2 * q * l) * (q + g) * (q + d)
    scale = abs((q - g) * (q - d)) + math.exp(2 * q * l) * abs((q + g) * (q + d))
    return float(abs(num) / scale)


def zero_residual(bvp: TransformedBVP) -> float:
    return abs(bvp.gamma + bvp.delta / (1 + bvp.delta * bvp.l))


# -- root extraction ---------------------------------------------------------

def trig_branch_roots(bvp: TransformedBVP, count: int) -> list:
    """The ``count`` smallest q > 0 on the trig branch.

    Each tan-continuity interval ql in ((m-1/2)pi, (m+1/2)pi) is scanned for
    sign changes with ends pulled in by POLE_GAP.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    l = bvp.l
    step = SCAN_FRACTION * math.pi / l

    def tan_form(q):
        return (q * q - bvp.delta * bvp.gamma) * math.tan(q * l) - q * (bvp.gamma + bvp.delta)

    def smooth(q):
        return float(trig_determinant(bvp, q))

    roots = []
    m = 0
    while len(roots) < count:
        lo = max(m - 0.5, 0.0) * math.pi / l + POLE_GAP
        hi = (m + 0.5) * math.pi / l - POLE_GAP
        for br in numerics.scan_brackets(tan_form, lo, hi, step):
            q = numerics.find_root(smooth, numerics.Bracket.of(smooth, br.lo, br.hi))
            if q * l < TRIVIAL_QL:
                continue
            if trig_residual(bvp, q) >= RESIDUAL_TOL:
                raise NoConvergence(f"trig root q={q} fails the residual check")
            roots.append(q)
            if len(roots) == count:
                break
        m += 1
        if m > 100 * count + 100:
            raise NoConvergence("trig branch scan exhausted")
    return roots


def exponential_branch_root(bvp: TransformedBVP) -> Optional[float]:
    """Root of exp(2ql) = R(q) on (0, -gamma), or None when gamma >= 0."""
    if bvp.gamma >= 0:
        return None
    top = -bvp.gamma
    lo, hi = POLE_GAP, top - POLE_GAP
    if hi <= lo:
        return None
    f = lambda q: exp_reduced(bvp, q)
    for br in numerics.scan_brackets(f, lo, hi, SCAN_FRACTION * top):
        q = numerics.find_root(f, br)
        if exp_residual(bvp, q) >= RESIDUAL_TOL:
            raise NoConvergence(f"exponential root q={q} fails the residual check")
        return q
    return None


def _trig_eig(bvp, q):
    theta = bvp.D * q * q
    return Eigenvalue(-bvp.shift - theta, theta, q, Branch.TRIG)


def _exp_eig(bvp, q):
    theta = -bvp.D * q * q
    return Eigenvalue(-bvp.shift - theta, theta, q, Branch.EXPONENTIAL)


def principal_eigenvalue(params: ReactorParams, alpha: float) -> Eigenvalue:
    if alpha > 1 + ALPHA_ONE_TOL:
        raise Unsupported(
            f"alpha={alpha} > 1 gives a positive principal eigenvalue (unstable loop)"
        )
    bvp = transform(params, alpha)
    if abs(alpha - 1) <= ALPHA_ONE_TOL:
        # q = delta: theta = -v^2/4D and lambda0 = 0 exactly
        return Eigenvalue(0.0, -bvp.shift, bvp.delta, Branch.EXPONENTIAL)
    crit = bvp.gamma + bvp.delta / (1 + bvp.delta * bvp.l)
    if abs(crit) < ZERO_BRANCH_TOL:
        return Eigenvalue(-bvp.shift, 0.0, 0.0, Branch.ZERO)
    if crit < 0:
        q = exponential_branch_root(bvp)
        if q is None:
            raise NoConvergence(f"no exponential-branch root found for alpha={alpha}")
        return _exp_eig(bvp, q)
    return _trig_eig(bvp, trig_branch_roots(bvp, 1)[0])


def spectrum(params: ReactorParams, alpha: float, num_eigs: int = 1) -> Spectrum:
    """Principal eigenvalue followed by further trig-branch eigenvalues."""
    principal = principal_eigenvalue(params, alpha)
    eigs = [principal]
    extra = num_eigs - 1
    if extra > 0:
        bvp = transform(params, alpha)
        skip = 1 if principal.branch is Branch.TRIG else 0
        qs = trig_branch_roots(bvp, extra + skip)[skip:]
        eigs.extend(_trig_eig(bvp, q) for q in qs)
    return Spectrum(alpha, tuple(eigs))


def determinant_residual(params: ReactorParams, eig: Eigenvalue, alpha: float) -> float:
    bvp = transform(params, alpha)
    if eig.branch is Branch.TRIG:
        return trig_residual(bvp, eig.q)
    if eig.branch is Branch.ZERO:
        return zero_residual(bvp)
    if abs(alpha - 1) <= ALPHA_ONE_TOL:
        return abs(eig.q - bvp.delta)
    return exp_residual(bvp, eig.q)


def eigenfunction(params: ReactorParams, eig: Eigenvalue, alpha: float,
                  grid: Grid) -> Profile:
    """xi(x) = exp(delta x) y(x), unit trapezoidal L2 norm, xi(l) > 0."""
    res = determinant_residual(params, eig, alpha)
    if res >= 1e-6:
        raise InconsistentInput(
            f"eigenvalue does not satisfy its determinant condition (residual {res:.2e})"
        )
    bvp = transform(params, alpha)
    g, q = bvp.gamma, eig.q
    x = grid.x
    # coefficients from the inlet condition y'(0) = gamma y(0)
    if eig.branch is Branch.TRIG:
        y = q * np.cos(q * x) + g * np.sin(q * x)
    elif eig.branch is Branch.ZERO:
        y = g * x + 1.0
    else:
        y = (q + g) * np.exp(q * x) + (q - g) * np.exp(-q * x)
    xi = np.exp(bvp.delta * x) * y
    if xi[-1] < 0:
        xi = -xi
    xi /= numerics.trapezoid_l2(xi, grid.spacing)
    return Profile(grid, xi)


def sturm_liouville_weights(params: ReactorParams):
    """(rho, p, q) with -A xi = (1/rho) (-(p xi')' + q xi).

    rho = exp(-v x / D), p = D * rho, q = 0.
    """
    c = params.v / params.D

    def rho(x):
        return np.exp(-c * np.asarray(x, dtype=float))

    def p(x):
        return params.D * rho(x)

    def q(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    return rho, p, q
