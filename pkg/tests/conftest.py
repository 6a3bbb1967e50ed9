import numpy as np
import pytest

from lmduality.classical import ModelParams

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def params():
    return ModelParams(m=1.0, g=1.0, k=1.0)


@pytest.fixture
def detuned():
    # g**2 != k m, all frequencies distinct
    return ModelParams(m=0.7, g=1.3, k=2.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
