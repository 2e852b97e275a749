import numpy as np
import pytest

from kgstar.asymptotics import step_profile
from kgstar.network import validate_network


@pytest.fixture
def sym():
    return validate_network((1.0, 1.0), (0.0, 0.0))


@pytest.fixture
def step3():
    return validate_network((1.0, 1.0), (0.0, 3.0))


@pytest.fixture(scope="session")
def step10():
    """Two branches with a=(0,10), bump on (0.25, 0.75) shifted by a_2."""
    return step_profile(0.0, 10.0, 0.25, 0.75)


def random_network(rng, n_max=6):
    n = int(rng.integers(2, n_max + 1))
    c = rng.uniform(0.3, 3.0, n)
    a = np.sort(rng.uniform(0.0, 10.0, n))
    a[0] = 0.0 if rng.random() < 0.3 else a[0]
    return validate_network(c, a)


_ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
