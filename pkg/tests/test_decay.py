import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tubular_feedback.decay import lipschitz_constant, lyapunov_exponent, theoretical_rate
from tubular_feedback.errors import InsufficientData, InvalidSpectrum
from tubular_feedback.model import ClosedLoopSetup, ReactorParams, m_star, phi, phi_at_outlet


class Curve:
    def __init__(self, t, y):
        self.times, self.norms = np.asarray(t), np.asarray(y)


def test_outlet_factor_matches_phi(params):
    for alpha in (-10.0, 0.0, 0.5, 0.9):
        setup = ClosedLoopSetup(params, alpha)
        assert phi_at_outlet(params, alpha) == pytest.approx(phi(setup, params.l), abs=1e-14)
    other = ReactorParams(D=0.01, v=0.3, l=2.5)
    assert phi_at_outlet(other, -3.0) == pytest.approx(phi(ClosedLoopSetup(other, -3.0), 2.5),
                                                      abs=1e-14)


def test_lipschitz_invariant_over_alpha(params, init_spec, lambda0_max):
    target = init_spec.mu * (-lambda0_max) / 2
    for alpha in np.linspace(-10, 0.95, 25):
        setup = ClosedLoopSetup(params, alpha, init_spec.mu * m_star(params, alpha, init_spec,
                                                                     lambda0_max))
        assert lipschitz_constant(setup) == pytest.approx(target, rel=1e-12)
    assert target == pytest.approx(0.000877, abs=1e-6)


def test_lipschitz_vanishes_with_amplitude(params):
    vals = [lipschitz_constant(ClosedLoopSetup(params, 0.0, m)) for m in (1.0, 1e-3, 1e-9, 0.0)]
    assert vals[-1] == 0.0
    assert np.all(np.diff(vals) < 0)


def test_rate_without_reaction(params):
    rep = theoretical_rate(ClosedLoopSetup(params.with_(k=0.0), 0.0, 1.0), -0.0174)
    assert rep.lipschitz_L == 0.0
    assert rep.lambda_T == -0.0174 and rep.omega == 0.0174
    assert rep.certificate_holds


def test_rate_numeric_example(params):
    # L = 0.004 from k n M phi(l) with M phi(l) = 2
    setup = ClosedLoopSetup(params, 0.0, 2.0 / phi_at_outlet(params, 0.0))
    rep = theoretical_rate(setup, -0.0174)
    assert rep.lipschitz_L == pytest.approx(0.004, abs=1e-15)
    assert rep.lambda_T == pytest.approx(-0.0134, abs=1e-12)
    assert rep.certificate_holds


def test_rate_boundary_case(params):
    # L exactly equal to -lambda0: no certificate
    setup = ClosedLoopSetup(params, 0.0, 2.0 / phi_at_outlet(params, 0.0))
    rep = theoretical_rate(setup, -lipschitz_constant(setup))
    assert not rep.certificate_holds and rep.lambda_T == 0.0


def test_rate_rejects_nonnegative(params):
    with pytest.raises(InvalidSpectrum):
        theoretical_rate(ClosedLoopSetup(params, 0.0), 0.0)


def test_rate_K_scaling(params):
    setup = ClosedLoopSetup(params, 0.0, 1.0)
    a = theoretical_rate(setup, -0.02, K=1.0)
    b = theoretical_rate(setup, -0.02, K=2.0)
    assert b.lambda_T - b.lipschitz_L == pytest.approx((a.lambda_T - a.lipschitz_L) / 4)


@given(m1=st.floats(1e-6, 50), m2=st.floats(1e-6, 50), alpha=st.floats(-10, 0.9))
def test_certificate_monotone_in_amplitude(m1, m2, alpha):
    p = ReactorParams()
    lo, hi = sorted((m1, m2))
    lam = -0.01
    c_lo = theoretical_rate(ClosedLoopSetup(p, alpha, lo), lam)
    c_hi = theoretical_rate(ClosedLoopSetup(p, alpha, hi), lam)
    assert c_lo.lipschitz_L <= c_hi.lipschitz_L
    assert c_lo.certificate_holds or not c_hi.certificate_holds


def test_fit_pure_exponential():
    t = np.linspace(0, 40, 801)
    fit = lyapunov_exponent(Curve(t, np.exp(-0.5 * t)))
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)


def test_fit_uses_trailing_window():
    # fast transient then slow mode: only the tail sets the slope
    t = np.linspace(0, 200, 4001)
    y = np.exp(-0.5 * t) + 1e-3 * np.exp(-0.01 * t)
    assert lyapunov_exponent(Curve(t, y)).slope == pytest.approx(-0.01, abs=1e-8)


def test_fit_drops_samples_under_floor():
    t = np.arange(100.0)
    y = np.exp(-t)
    y[60:] = 1e-300  # halted run padding
    fit = lyapunov_exponent(Curve(t, y), floor_ratio=1e-20)
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)


def test_fit_insufficient():
    with pytest.raises(InsufficientData):
        lyapunov_exponent(Curve(np.arange(15.0), np.exp(-np.arange(15.0))))
    with pytest.raises(ValueError):
        lyapunov_exponent(Curve(np.arange(50.0), np.ones(50)), window_fraction=0.0)


def test_window_fraction_two_regimes():
    t = np.linspace(0, 400, 8001)
    fast, slow = 0.1, 0.01
    # piecewise exponential, continuous at t=100
    y = np.where(t < 100, np.exp(-fast * t), np.exp(-fast * 100 - slow * (t - 100)))
    whole = lyapunov_exponent(Curve(t, y), window_fraction=1.0).slope
    assert -fast < whole < -slow
    tail = lyapunov_exponent(Curve(t, y), window_fraction=0.25).slope
    assert abs(tail + slow) < 1e-3
