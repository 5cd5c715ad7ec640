import numpy as np
import pytest

from qaoasat import SatInstance


@pytest.fixture
def two_clause():
    """(x0 or x1) and (not x0 or not x1)."""
    return SatInstance.from_lists(2, [[1, 2], [-1, -2]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return amps / np.linalg.norm(amps)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
