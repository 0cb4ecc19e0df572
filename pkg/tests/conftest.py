import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qtomo.numerics import GridLeakageWarning

settings.register_profile("qtomo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qtomo")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridLeakageWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
