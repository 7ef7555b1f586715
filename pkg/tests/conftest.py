import time

import pytest

from tubular_feedback.model import ClosedLoopSetup, Grid, InitialDataSpec, ReactorParams
from tubular_feedback.spectral import principal_eigenvalue

ACCEPTANCE_RESULTS = {}
SWEEP_TIMING = {}


@pytest.fixture(scope="session")
def params():
    return ReactorParams()


@pytest.fixture(scope="session")
def init_spec():
    return InitialDataSpec()


@pytest.fixture(scope="session")
def lambda0_max(params, init_spec):
    return principal_eigenvalue(params, init_spec.alpha_max).lam


@pytest.fixture
def setup0(params):
    return ClosedLoopSetup(params, 0.0, 1.0)


@pytest.fixture(scope="session")
def default_sweep(tmp_path_factory):
    """Full default gain sweep, shared by the sweep and acceptance tests."""
    from tubular_feedback.config import load_config
    from tubular_feedback.sweep import run_sweep

    out = tmp_path_factory.mktemp("sweep_a")
    spec = load_config(None, {"outputs": out, "workers": 1})
    start = time.perf_counter()
    rows = run_sweep(spec)
    SWEEP_TIMING["default"] = time.perf_counter() - start
    return spec, rows, out


def record_acceptance(key, passed, detail):
    ACCEPTANCE_RESULTS[key] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][2:])):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {key}: {detail}")
