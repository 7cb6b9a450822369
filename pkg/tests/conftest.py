import numpy as np
import pytest

from betavol.betalinalg import FMatrix


def random_fmatrix(rng: np.random.Generator, beta: int, n: int, N: int, size=()) -> FMatrix:
    shape = (*size, n, N, beta)
    return FMatrix.from_components(beta, rng.standard_normal(shape))


@pytest.fixture
def nprng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
