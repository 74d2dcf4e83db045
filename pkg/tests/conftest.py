"""Shared test fixtures and the end-of-run acceptance summary."""

import numpy as np
import pytest

# The acceptance module appends one verdict line per criterion; they are
# echoed after the run so the batch outcome is visible at a glance.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
