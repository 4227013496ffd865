import pytest
from hypothesis import HealthCheck, settings

from wavesynth.modal import cached_context
from wavesynth.scenarios import (
    ExperimentConfig,
    run_epw_stability,
    run_ppw_instability,
    run_quasi_optimality,
    run_triangle,
)

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# (index, name, passed, detail) lines collected by the acceptance tests
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for idx, name, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{idx:2d}] {'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture(scope="session")
def ctx16():
    return cached_context(16.0, 256)


@pytest.fixture(scope="session")
def ppw_table():
    """Propagative sweep at kappa=16: M in {4,8,16,32} kappa, p = 0..96."""
    return run_ppw_instability(ExperimentConfig(kappa=16.0))


@pytest.fixture(scope="session")
def epw_table():
    """Evanescent sweep at kappa=16, P=64, Sobol nodes, p = -64..64."""
    return run_epw_stability(ExperimentConfig(kappa=16.0, P=64, strategy="sobol"))


@pytest.fixture(scope="session")
def triangle_table():
    """Triangle sweep at kappa=16, M = 20..600 step 20, both sources and wave kinds."""
    return run_triangle(ExperimentConfig(kappa=16.0, bulk_error=True))


@pytest.fixture(scope="session")
def quasi_table():
    """Quasi-optimal set sizes at kappa=16, sigma=1e-12, Sobol, P in {2,3,4} kappa."""
    return run_quasi_optimality(ExperimentConfig(kappa=16.0, P_values=[32, 48, 64]))
