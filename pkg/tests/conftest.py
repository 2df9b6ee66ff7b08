import numpy as np
import pytest

from decoysync import build_intensity_table


@pytest.fixture
def base_table():
    return build_intensity_table(0.5, 0.25, 0.7, 0.3)


@pytest.fixture
def bright_table():
    return build_intensity_table(0.5, 0.25, 0.7, 0.3, 50.0, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
