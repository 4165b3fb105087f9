import numpy as np
import pytest

from weakrev import RandomSource


@pytest.fixture
def rng():
    return RandomSource(seed=20240601)


PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
