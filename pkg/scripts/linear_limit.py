"""Without reaction the fitted decay slope should equal the principal eigenvalue."""

from tubular_feedback import ClosedLoopSetup, Grid, Profile, ReactorParams
from tubular_feedback.decay import lyapunov_exponent
from tubular_feedback.model import phi
from tubular_feedback.pde_sim import SimConfig, simulate
from tubular_feedback.spectral import principal_eigenvalue

params = ReactorParams(k=0.0)
grid = Grid(params.l, 201)
print(f"{'alpha':>6} {'slope':>11} {'lambda0':>11} {'diff':>9}")
for alpha in (-10.0, 0.0, 0.5, 0.75, 0.9):
    setup = ClosedLoopSetup(params, alpha, 1.0)
    rec = simulate(setup, Profile.zeros(grid), Profile(grid, phi(setup, grid.x)),
                   SimConfig(grid, dt=0.05, t_final=2000.0))
    slope = lyapunov_exponent(rec).slope
    lam0 = principal_eigenvalue(params, alpha).lam
    print(f"{alpha:>6g} {slope:11.7f} {lam0:11.7f} {abs(slope - lam0):9.2e}")
