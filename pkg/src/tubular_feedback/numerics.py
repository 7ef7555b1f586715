"""Shared numerical kernels: bracketed root finding, tridiagonal solves,
trapezoidal L2 norms and least-squares line fits."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateInput, InvalidBracket, NoConvergence, SingularMatrix

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidBracket(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise InvalidBracket(
                f"no sign change on [{self.lo}, {self.hi}]: f={self.f_lo}, {self.f_hi}"
            )

    @classmethod
    def of(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, f(lo), f(hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    residual_rms: float


def find_root(f, bracket: Bracket, tol: float = DEFAULT_TOL,
              max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Root of ``f`` inside ``bracket``.

    Secant (false-position) steps alternate with forced bisection, so the
    bracket at least halves every two iterations and the iterate never
    leaves it. Terminates when the bracket width is <= ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi, f_lo, f_hi = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if f_lo == 0:
        return float(lo)
    if f_hi == 0:
        return float(hi)
    for it in range(max_iter):
        if hi - lo <= tol:
            # report the endpoint with the smaller residual
            return float(lo if abs(f_lo) <= abs(f_hi) else hi)
        mid = 0.5 * (lo + hi)
        x = mid
        if it % 2 == 0:
            s = lo - f_lo * (hi - lo) / (f_hi - f_lo)
            if lo < s < hi and np.isfinite(s):
                x = s
        fx = f(x)
        if fx == 0:
            return float(x)
        if (fx < 0) == (f_lo < 0):
            lo, f_lo = x, fx
        else:
            hi, f_hi = x, fx
    raise NoConvergence(f"bracket width {hi - lo:.3e} after {max_iter} iterations")


def scan_brackets(f, lo: float, hi: float, step: float):
    """Yield sign-change brackets of ``f`` on a uniform scan of [lo, hi]."""
    n = max(int(np.ceil((hi - lo) / step)), 1)
    xs = np.linspace(lo, hi, n + 1)
    x_prev, f_prev = xs[0], f(xs[0])
    for x in xs[1:]:
        fx = f(x)
        if np.isfinite(f_prev) and np.isfinite(fx) and f_prev * fx <= 0:
            yield Bracket(x_prev, x, f_prev, fx)
        x_prev, f_prev = x, fx


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Thomas algorithm for ``A x = rhs`` with A given by its three bands.

    ``lower`` and ``upper`` have length n-1; ``lower[i]`` sits at row i+1.
    """
    b = np.asarray(diag, dtype=float)
    a = np.asarray(lower, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float)
    n = b.size
    if d.shape[0] != n or a.size != n - 1 or c.size != n - 1:
        raise ValueError("inconsistent tridiagonal dimensions")
    cp = np.empty(max(n - 1, 0))
    dp = np.empty_like(d)
    piv = b[0]
    if abs(piv) < PIVOT_FLOOR:
        raise SingularMatrix("zero pivot in row 0")
    if n > 1:
        cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i - 1] * cp[i - 1]
        if abs(piv) < PIVOT_FLOOR:
            raise SingularMatrix(f"zero pivot in row {i}")
        if i < n - 1:
            cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / piv
    x = dp
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def trapezoid_l2(values, spacing: float) -> float:
    v = np.asarray(values, dtype=float)
    sq = v * v
    return float(np.sqrt(spacing * (sq.sum() - 0.5 * (sq[0] + sq[-1]))))


def l2_norm(p) -> float:
    """Trapezoidal L2 norm of a sampled profile on its uniform grid."""
    if len(p.values) < 2:
        raise ValueError("need at least two samples")
    return trapezoid_l2(p.values, p.grid.spacing)


def fit_line(t, y) -> LineFit:
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 2 or t.size != y.size:
        raise DegenerateInput("need at least two (t, y) pairs of equal length")
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx == 0.0:
        raise DegenerateInput("all abscissae are equal")
    slope = float(tc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * t.mean())
    resid = y - (slope * t + intercept)
    return LineFit(slope, intercept, float(np.sqrt(np.mean(resid * resid))))
