import math

import pytest

from satops.astro import OrbitState
from satops.core import EARTH, Epoch, make_spacecraft

T0 = Epoch.from_iso("2022-10-27T12:30:00Z")
A_550 = EARTH.equatorial_radius + 550e3  # 6928137 m


@pytest.fixture
def t0():
    return T0


@pytest.fixture
def leo(t0):
    return OrbitState.circular(550e3, 10.0, 0.0, 0.0, t0)


@pytest.fixture
def sat(t0, leo):
    return make_spacecraft("sat1", t0, leo)


def unit(v):
    n = math.sqrt(sum(c * c for c in v))
    return tuple(c / n for c in v)


# acceptance verdicts, echoed again in the terminal summary
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
