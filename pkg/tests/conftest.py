import numpy as np
import pytest

from slitwave.core import make_preset


@pytest.fixture(scope="session")
def ref18():
    return make_preset("ref18")


@pytest.fixture(scope="session")
def ref19():
    return make_preset("ref19")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
