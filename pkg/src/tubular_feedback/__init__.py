"""Spectral analysis, simulation and decay-rate estimation for a tubular
reactor stabilised by inlet recycle feedback u(t) = alpha * C_A(0, t)."""

from .decay import DecayReport, lipschitz_constant, lyapunov_exponent, theoretical_rate
from .model import (
    ClosedLoopSetup,
    Grid,
    InitialDataSpec,
    Profile,
    ReactorParams,
    initial_data,
    m_star,
    phi,
    validate,
)
from .spectral import critical_alpha, eigenfunction, principal_eigenvalue, spectrum

__version__ = "0.1.0"
