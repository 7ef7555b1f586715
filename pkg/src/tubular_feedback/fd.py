"""Second-order finite differences for D xi'' - v xi' on a uniform grid.

Boundary nodes are not unknowns: the closed-loop inlet relation
(1-alpha) xi(0) = (D/v) xi'(0) and the outlet relation xi'(l) = 0 are
imposed with one-sided three-point derivatives and solved for xi_0 and
xi_{N-1}. Substituting them into the first and last interior rows keeps
the reduced interior operator tridiagonal.
"""

from dataclasses import dataclass

import numpy as np

from .model import Grid, ReactorParams

MIN_POINTS = 5


@dataclass(frozen=True)
class Closure:
    """xi_0 = in1 xi_1 + in2 xi_2 and xi_{N-1} = out1 xi_{N-2} + out2 xi_{N-3}."""

    in1: float
    in2: float
    out1: float
    out2: float

    def expand(self, interior: np.ndarray) -> np.ndarray:
        full = np.empty(interior.size + 2)
        full[1:-1] = interior
        full[0] = self.in1 * interior[0] + self.in2 * interior[1]
        full[-1] = self.out1 * interior[-1] + self.out2 * interior[-2]
        return full


def stencil(params: ReactorParams, h: float):
    """Coefficients (west, centre, east) of the interior row."""
    D, v = params.D, params.v
    return D / h**2 + v / (2 * h), -2 * D / h**2, D / h**2 - v / (2 * h)


def closure(params: ReactorParams, alpha: float, h: float) -> Closure:
    beta = params.D / (2 * h * params.v)
    den = 3 * beta + (1 - alpha)
    return Closure(4 * beta / den, -beta / den, 4.0 / 3.0, -1.0 / 3.0)


def reduced_bands(params: ReactorParams, alpha: float, grid: Grid):
    """(lower, diag, upper) of the interior operator after boundary elimination."""
    if grid.n_points < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} grid points")
    h = grid.spacing
    w, c, e = stencil(params, h)
    cl = closure(params, alpha, h)
    m = grid.n_points - 2
    lower = np.full(m - 1, w)
    diag = np.full(m, c)
    upper = np.full(m - 1, e)
    diag[0] += w * cl.in1
    upper[0] += w * cl.in2
    diag[-1] += e * cl.out1
    lower[-1] += e * cl.out2
    return lower, diag, upper


def band_matvec(lower, diag, upper, x):
    y = diag * x
    y[:-1] += upper * x[1:]
    y[1:] += lower * x[:-1]
    return y


def apply_interior(params: ReactorParams, values, h: float) -> np.ndarray:
    """D u'' - v u' at interior nodes of a full-grid sample."""
    u = np.asarray(values, dtype=float)
    w, c, e = stencil(params, h)
    return w * u[:-2] + c * u[1:-1] + e * u[2:]


def inlet_residual(params: ReactorParams, alpha: float, values, h: float) -> float:
    """(D/v) u'(0) - (1-alpha) u(0) with the one-sided O(h^2) derivative."""
    u = values
    du = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    return float(params.D / params.v * du - (1 - alpha) * u[0])


def outlet_residual(values, h: float) -> float:
    u = values
    return float((u[-3] - 4 * u[-2] + 3 * u[-1]) / (2 * h))
