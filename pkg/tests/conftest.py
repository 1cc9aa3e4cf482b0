"""Shared fixtures: the two production frames and the acceptance report hook.

Frames are session-scoped because the dense eigensolve costs a few seconds;
every test that needs eigen-data shares these two. All grids here are the
n = 2048 defaults; coarser grids fail the eigenfunction decay guard.
"""

import numpy as np
import pytest

from gkdvlab import WaveParams, default_grid, unstable_eigenpair

CRITERION_LINES = []


def record_criterion(line):
    CRITERION_LINES.append(line)
    print(line)


@pytest.fixture(scope="session")
def params1():
    return WaveParams(7, 1.0)


@pytest.fixture(scope="session")
def frame1(params1):
    return unstable_eigenpair(params1, default_grid(params1))


@pytest.fixture(scope="session")
def params4():
    return WaveParams(7, 4.0)


@pytest.fixture(scope="session")
def frame4(params4):
    return unstable_eigenpair(params4, default_grid(params4))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(CRITERION_LINES):
        terminalreporter.write_line(line)
