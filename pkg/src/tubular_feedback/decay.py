"""Decay characteristics: Lipschitz bound, certified rate and fitted exponent."""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InsufficientData, InvalidSpectrum
from .model import ClosedLoopSetup, phi_at_outlet
from .numerics import LineFit, fit_line

MIN_FIT_SAMPLES = 10
NORM_FLOOR = 1e-13


@dataclass(frozen=True)
class DecayReport:
    alpha: float
    lambda0: float
    lipschitz_L: float
    lambda_T: float
    certificate_holds: bool
    omega: float
    lambda_num: Optional[float] = None

    def with_lambda_num(self, value: float) -> "DecayReport":
        return replace(self, lambda_num=value)


def lipschitz_constant(setup: ClosedLoopSetup) -> float:
    """k n (M phi(l))^(n-1): the reaction's Lipschitz bound on the invariant set."""
    p = setup.params
    return p.k * p.n * (setup.m_amplitude * phi_at_outlet(p, setup.alpha)) ** (p.n - 1)


def theoretical_rate(setup: ClosedLoopSetup, lambda0: float, K: float = 1.0) -> DecayReport:
    if lambda0 >= 0:
        raise InvalidSpectrum(f"principal eigenvalue must be negative, got {lambda0}")
    L = lipschitz_constant(setup)
    lam_T = lambda0 / K**2 + L
    return DecayReport(
        alpha=setup.alpha,
        lambda0=lambda0,
        lipschitz_L=L,
        lambda_T=lam_T,
        certificate_holds=L < -lambda0 / K**2,
        omega=-lam_T,
    )


def lyapunov_exponent(record, window_fraction: float = 0.5,
                      floor_ratio: float = NORM_FLOOR) -> LineFit:
    """Least-squares slope of ln ||xi(t)|| over the trailing window.

    Only samples above ``floor_ratio * norms[0]`` take part; the window is
    the last ``window_fraction`` of those.
    """
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    t = np.asarray(record.times, dtype=float)
    y = np.asarray(record.norms, dtype=float)
    keep = y > floor_ratio * y[0] if y.size and y[0] > 0 else y > 0
    t, y = t[keep], y[keep]
    n_win = int(np.floor(window_fraction * t.size))
    if n_win < MIN_FIT_SAMPLES:
        raise InsufficientData(
            f"{n_win} samples in the fitting window, need {MIN_FIT_SAMPLES}"
        )
    return fit_line(t[-n_win:], np.log(y[-n_win:]))
