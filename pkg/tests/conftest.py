import re
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hbcalc.circle import GridSpec, HardyFunction  # noqa: E402
from hbcalc.core import mate  # noqa: E402


@pytest.fixture(scope="session")
def grid():
    return GridSpec(4096)


@pytest.fixture(scope="session")
def half(grid):
    """b = (1 + z)/2."""
    return mate(HardyFunction([0.5, 0.5]), grid, label="half-one-plus-z")


@pytest.fixture(scope="session")
def zhalf(grid):
    """b = z/2."""
    return mate(HardyFunction([0, 0.5]), grid, label="rz(0.5)")


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(1024)


@pytest.fixture(scope="session")
def half_small(small_grid):
    return mate(HardyFunction([0.5, 0.5]), small_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion at the end of the run

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(key, "PASS")
        _CRITERIA[key] = "PASS" if (report.passed and prev == "PASS") else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), verdict in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num:2d} {name.replace('_', ' ')}: {verdict}")
