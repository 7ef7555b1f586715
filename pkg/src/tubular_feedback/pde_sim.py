"""IMEX Crank-Nicolson integration of the closed-loop reactor PDE.

The state is the deviation xi = C_A - C_bar on the interior nodes; boundary
nodes follow from the discrete Robin/Neumann closure. Transport and
dispersion are treated with the trapezoidal rule, the reaction term
r(xi) = k C_bar^n - k (xi + C_bar)^n explicitly at a predicted half step.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from . import fd
from .errors import NegativeConcentration, NonFiniteState, SingularMatrix
from .model import ClosedLoopSetup, Grid, Profile, phi, phi_prime
from .numerics import trapezoid_l2

NORM_FLOOR = 1e-13
INVARIANT_RTOL = 1e-8


class Form(enum.Enum):
    DEVIATION = "deviation"
    RAW = "raw"


@dataclass(frozen=True)
class SimConfig:
    grid: Grid
    dt: float = 0.05
    t_final: float = 2000.0
    snapshot_stride: int = 2000
    form: Form = Form.DEVIATION

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_final >= self.dt:
            raise ValueError("t_final must be >= dt")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    norms: np.ndarray
    snapshots: list
    invariant_violations: int
    steady: Profile
    m_amplitude: float
    halted_early: bool = False
    meta: dict = field(default_factory=dict)


class StepOperator:
    """Reusable factorisation of the Crank-Nicolson pair for A_h.

    ``implicit`` is I - dt/2 A_h (LAPACK gttrf factors), ``explicit``
    applies I + dt/2 A_h. Both act on interior nodes.
    """

    def __init__(self, setup: ClosedLoopSetup, grid: Grid, dt: float):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.setup = setup
        self.grid = grid
        self.dt = dt
        self.closure = fd.closure(setup.params, setup.alpha, grid.spacing)
        self.bands = fd.reduced_bands(setup.params, setup.alpha, grid)
        lower, diag, upper = self.bands
        half = 0.5 * dt
        self._exp = (half * lower, 1.0 + half * diag, half * upper)
        dl, d, du, du2, ipiv, info = lapack.dgttrf(-half * lower, 1.0 - half * diag,
                                                   -half * upper)
        if info != 0:
            raise SingularMatrix(f"Crank-Nicolson matrix is singular (info={info})")
        self._lu = (dl, d, du, du2, ipiv)

    def apply(self, interior: np.ndarray) -> np.ndarray:
        """A_h on interior values."""
        return fd.band_matvec(*self.bands, interior)

    def apply_full(self, values) -> np.ndarray:
        """Interior stencil rows of A_h on a full-grid sample (no closure)."""
        return fd.apply_interior(self.setup.params, values, self.grid.spacing)

    def boundary_residuals(self, values):
        """(inlet, outlet) discrete boundary relations of a full-grid sample."""
        h = self.grid.spacing
        return (fd.inlet_residual(self.setup.params, self.setup.alpha, values, h),
                fd.outlet_residual(values, h))

    def explicit(self, interior: np.ndarray) -> np.ndarray:
        return fd.band_matvec(*self._exp, interior)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dgttrs(*self._lu, rhs)
        if info != 0:
            raise SingularMatrix(f"dgttrs failed (info={info})")
        return x

    def expand(self, interior: np.ndarray) -> np.ndarray:
        return self.closure.expand(interior)


def step_operator(setup: ClosedLoopSetup, grid: Grid, dt: float) -> StepOperator:
    return StepOperator(setup, grid, dt)


def reaction(setup: ClosedLoopSetup, xi: np.ndarray, cbar: np.ndarray,
             cbar_n: np.ndarray, tol_inv: float) -> np.ndarray:
    """r(xi) = k C_bar^n - k (xi + C_bar)^n."""
    p = setup.params
    c = xi + cbar
    if float(p.n).is_integer():
        return p.k * (cbar_n - c ** int(p.n))
    if np.min(c) < -tol_inv:
        raise NegativeConcentration(f"concentration {np.min(c):.3e} below zero")
    return p.k * (cbar_n - np.maximum(c, 0.0) ** p.n)


def imex_step(op: StepOperator, setup: ClosedLoopSetup, xi, cbar, cbar_n, tol_inv):
    """One predictor-corrector IMEX step on interior values."""
    dt = op.dt
    lin = op.explicit(xi)
    pred = op.solve(lin + dt * reaction(setup, xi, cbar, cbar_n, tol_inv))
    mid = 0.5 * (xi + pred)
    return op.solve(lin + dt * reaction(setup, mid, cbar, cbar_n, tol_inv))


def simulate(setup: ClosedLoopSetup, steady: Profile, xi0: Profile,
             cfg: SimConfig) -> TrajectoryRecord:
    """Integrate from ``xi0`` and record the L2 norm of xi at every step."""
    grid = cfg.grid
    if xi0.grid != grid or steady.grid != grid:
        raise ValueError("xi0 and steady must live on cfg.grid")
    p = setup.params
    op = step_operator(setup, grid, cfg.dt)
    h = grid.spacing
    m_phi = setup.m_amplitude * phi(setup, grid.x)
    tol_inv = INVARIANT_RTOL * float(np.max(m_phi))
    cbar_full = steady.values
    cbar = cbar_full[1:-1]
    n_int = float(p.n).is_integer()
    # Raw form evolves C = xi + C_bar with a zero reference profile
    if cfg.form is Form.RAW:
        ref, ref_n = np.zeros_like(cbar), np.zeros_like(cbar)
        state = xi0.values[1:-1] + cbar
    else:
        ref = cbar
        ref_n = cbar ** int(p.n) if n_int else np.maximum(cbar, 0.0) ** p.n
        state = xi0.values[1:-1].copy()

    n_steps = int(round(cfg.t_final / cfg.dt))
    times = np.empty(n_steps + 1)
    norms = np.empty(n_steps + 1)
    times[0] = 0.0
    norms[0] = trapezoid_l2(xi0.values, h)
    snapshots = [(0.0, Profile(grid, xi0.values.copy()))]
    c0 = xi0.values + cbar_full
    violations = int(np.count_nonzero((c0 < -tol_inv) | (c0 > m_phi + tol_inv)))
    floor = NORM_FLOOR * norms[0]
    count = n_steps + 1
    halted = False

    for i in range(1, n_steps + 1):
        state = imex_step(op, setup, state, ref, ref_n, tol_inv)
        full = op.expand(state)
        if not np.all(np.isfinite(full)):
            raise NonFiniteState(f"non-finite state at step {i}")
        if cfg.form is Form.RAW:
            conc = full
            xi = full - cbar_full
        else:
            xi = full
            conc = full + cbar_full
        violations += int(np.count_nonzero((conc < -tol_inv) | (conc > m_phi + tol_inv)))
        t = i * cfg.dt
        times[i] = t
        norms[i] = trapezoid_l2(xi, h)
        if i % cfg.snapshot_stride == 0:
            snapshots.append((t, Profile(grid, xi)))
        if norms[i] < floor:
            count = i + 1
            halted = True
            break

    if halted and (count - 1) % cfg.snapshot_stride != 0:
        snapshots.append((times[count - 1], Profile(grid, xi)))
    return TrajectoryRecord(
        times=times[:count],
        norms=norms[:count],
        snapshots=snapshots,
        invariant_violations=violations,
        steady=steady,
        m_amplitude=setup.m_amplitude,
        halted_early=halted,
        meta={"form": cfg.form.value, "dt": cfg.dt, "nx": grid.n_points},
    )


@dataclass
class InvarianceSummary:
    times: np.ndarray
    min_concentration: np.ndarray
    max_ratio: np.ndarray
    flagged: list
    tol_inv: float

    @property
    def ok(self) -> bool:
        return not self.flagged


def invariance_report(record: TrajectoryRecord, setup: ClosedLoopSetup) -> InvarianceSummary:
    """Per-snapshot min of C_A and max of C_A / (M phi)."""
    setup = setup.with_(m_amplitude=record.m_amplitude)
    grid = record.steady.grid
    m_phi = setup.m_amplitude * phi(setup, grid.x)
    tol_inv = INVARIANT_RTOL * float(np.max(m_phi))
    ts, mins, ratios, flagged = [], [], [], []
    for t, snap in record.snapshots:
        conc = snap.values + record.steady.values
        ts.append(t)
        mins.append(float(np.min(conc)))
        ratios.append(float(np.max(conc / m_phi)))
        if np.any(conc < -tol_inv) or np.any(conc > m_phi + tol_inv):
            flagged.append(t)
    return InvarianceSummary(np.array(ts), np.array(mins), np.array(ratios), flagged, tol_inv)


@dataclass(frozen=True)
class SupersolutionReport:
    min_slack: float
    inlet_residual: float
    outlet_residual: float
    fd_inlet_residual: float
    fd_outlet_residual: float

    @property
    def holds(self) -> bool:
        return self.min_slack >= 0 and abs(self.inlet_residual) < 1e-10 \
            and abs(self.outlet_residual) < 1e-10


def supersolution_check(setup: ClosedLoopSetup, grid: Grid) -> SupersolutionReport:
    """Evaluate the super-solution relations for C_max = M phi on ``grid``.

    Exact derivatives of phi are used for the main report; the fd_* fields
    repeat the boundary relations with one-sided differences.
    """
    p = setup.params
    M = setup.m_amplitude
    x = grid.x
    cmax = M * phi(setup, x)
    d1 = M * phi_prime(setup, x)
    d2 = -2.0 * M
    slack = -p.D * d2 + p.v * d1 + p.k * cmax**p.n
    h = grid.spacing
    return SupersolutionReport(
        min_slack=float(np.min(slack)),
        inlet_residual=float(p.D / p.v * d1[0] - (1 - setup.alpha) * cmax[0]),
        outlet_residual=float(d1[-1]),
        fd_inlet_residual=fd.inlet_residual(p, setup.alpha, cmax, h),
        fd_outlet_residual=fd.outlet_residual(cmax, h),
    )
