import math

import numpy as np
import pytest

from sobolev_hodge.strip import StripGrid


@pytest.fixture(scope="session")
def small_grid():
    return StripGrid(N=2, L=4 * math.pi, M=8, X_max=12.0, P=257)


@pytest.fixture(scope="session")
def grid1d():
    return StripGrid(N=1, L=4 * math.pi, M=8, X_max=12.0, P=513)


@pytest.fixture(scope="session")
def ref_grid():
    return StripGrid(N=2, L=4 * math.pi, M=16, X_max=12.0, P=1025)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
