"""Reactor parameters, closed-loop configuration, grids/profiles and the
initial data used by the decay-rate experiments."""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidSpectrum, OutOfDomain


@dataclass(frozen=True)
class ReactorParams:
    """Constants of the axial-dispersion model.

    D: dispersion (m^2/s), v: flow rate (m/s), l: length (m),
    k: rate constant, n: reaction order.
    """

    D: float = 0.0025
    v: float = 0.01
    l: float = 1.0
    k: float = 0.001
    n: float = 2.0

    def with_(self, **changes) -> "ReactorParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ClosedLoopSetup:
    params: ReactorParams
    alpha: float
    m_amplitude: float = 1.0

    def with_(self, **changes) -> "ClosedLoopSetup":
        return replace(self, **changes)


@dataclass(frozen=True)
class InitialDataSpec:
    mu: float = 0.9
    alpha_max: float = 0.95

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise ValueError(f"mu must lie in (0, 1), got {self.mu}")
        if not self.alpha_max < 1:
            raise ValueError(f"alpha_max must be < 1, got {self.alpha_max}")


@dataclass(frozen=True)
class Grid:
    l: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("a grid needs at least 3 points")
        if not self.l > 0:
            raise ValueError("grid length must be positive")

    @property
    def spacing(self) -> float:
        return self.l / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.l, self.n_points)


@dataclass(frozen=True, eq=False)
class Profile:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("profile contains non-finite values")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: Grid) -> "Profile":
        return cls(grid, np.zeros(grid.n_points))

    @classmethod
    def sample(cls, grid: Grid, func) -> "Profile":
        return cls(grid, np.asarray(func(grid.x), dtype=float))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "all hypotheses hold"
        return "violated: " + "; ".join(self.violations)


def phi(setup: ClosedLoopSetup, x):
    """Weight of the invariant set: -(x-l)^2 + l^2 + 2Dl/(v(1-alpha)).

    Accepts a scalar or an array of positions in [0, l].
    """
    p = setup.params
    xa = np.asarray(x, dtype=float)
    slack = 1e-12 * p.l
    if np.any(xa < -slack) or np.any(xa > p.l + slack):
        raise OutOfDomain(f"x must lie in [0, {p.l}]")
    val = -(xa - p.l) ** 2 + p.l**2 + 2 * p.D * p.l / (p.v * (1 - setup.alpha))
    return float(val) if val.ndim == 0 else val


def phi_prime(setup: ClosedLoopSetup, x):
    return 2.0 * (setup.params.l - np.asarray(x, dtype=float))


def phi_at_outlet(params: ReactorParams, alpha: float) -> float:
    """phi(l) in the closed form (l^2 v(1-a) + 2Dl) / (v(1-a))."""
    return (params.l**2 * params.v * (1 - alpha) + 2 * params.D * params.l) / (
        params.v * (1 - alpha)
    )


def m_star(params: ReactorParams, alpha: float, spec: InitialDataSpec,
           lambda0_at_alpha_max: float) -> float:
    if lambda0_at_alpha_max >= 0:
        raise InvalidSpectrum("lambda0(alpha_max) must be negative")
    p = params
    scale = (-lambda0_at_alpha_max / (p.k * p.n)) ** (1.0 / (p.n - 1))
    one_m = 1 - alpha
    return scale * p.v * one_m / (2 * p.l**2 * p.v * one_m + 4 * p.D * p.l)


def initial_data(setup: ClosedLoopSetup, spec: InitialDataSpec,
                 lambda0_at_alpha_max: float, grid: Grid) -> Profile:
    """Sample mu * M* * phi(x) on ``grid``."""
    ms = m_star(setup.params, setup.alpha, spec, lambda0_at_alpha_max)
    return Profile(grid, spec.mu * ms * phi(setup, grid.x))


def validate(setup: ClosedLoopSetup) -> ValidationReport:
    p = setup.params
    bad = []
    for name in ("D", "v", "l", "k"):
        if not getattr(p, name) > 0:
            bad.append(f"{name} > 0")
    if not p.n > 1:
        bad.append("n > 1")
    if not setup.alpha < 1:
        bad.append("alpha < 1")
    if not setup.m_amplitude > 0:
        bad.append("M > 0")
    return ValidationReport(bad)
