import numpy as np
import pytest

from qdynent.haar import HaarSampler
from qdynent.matcore import fourier_matrix


def haar(d, seed=0, n=None):
    return HaarSampler(d, seed).sample(n)


def fourier_unitary(d):
    return fourier_matrix(d) / np.sqrt(d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance results, echoed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
