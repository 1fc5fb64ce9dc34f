import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from halfscat.potential import Potential

settings.register_profile(
    "default", max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def smooth_bump(height=0.5, grid_n=2049):
    """C-infinity bump vanishing with all derivatives at 0 and 1, peak `height` at 1/2."""
    def f(x):
        s = np.clip(x * (1.0 - x), 1e-300, None)
        return height * np.exp(4.0 - 1.0 / s)
    return Potential.from_function(f, grid_n)


@pytest.fixture(scope="session")
def zero():
    return Potential.zero()


@pytest.fixture(scope="session")
def bump():
    return Potential.from_function(lambda x: 0.5 * np.exp(-30 * (x - 0.4) ** 2) + 0.2 * x)


@pytest.fixture(scope="session")
def even_bump():
    return Potential.from_function(lambda x: 2.0 * np.exp(-20 * (x - 0.5) ** 2))


@pytest.fixture(scope="session")
def cbump():
    return smooth_bump()


@pytest.fixture(scope="session")
def test_potentials(bump, even_bump):
    """Three L+ potentials of differing character."""
    wave = Potential.from_function(lambda x: 3.0 * np.cos(2 * np.pi * x) - 0.5 * x)
    return [bump, even_bump, wave]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
