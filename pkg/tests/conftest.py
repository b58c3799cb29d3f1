import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from riskshadow.encounter import AgentState
from riskshadow.geometry import Footprint, Path

# Every property suite runs at least this many cases.
N_CASES = int(os.environ.get("RISKSHADOW_CASES", "200"))
settings.register_profile(
    "riskshadow",
    max_examples=N_CASES,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("riskshadow")

# criterion number -> the line printed by tests/test_acceptance.py
ACCEPTANCE: dict = {}

CAR = Footprint(4.5, 1.8)
TRUCK = Footprint(10.0, 2.5)


def straight(x0, y0, heading, length):
    return Path([(x0, y0), (x0 + length * math.cos(heading), y0 + length * math.sin(heading))])


@st.composite
def paths(draw, bend=True):
    """Polyline of one or two segments passing near the origin."""
    heading = draw(st.floats(-math.pi, math.pi))
    back = draw(st.floats(10.0, 50.0))
    offset = draw(st.floats(-6.0, 6.0))
    c, s = math.cos(heading), math.sin(heading)
    start = (-back * c - offset * s, -back * s + offset * c)
    first = draw(st.floats(back, back + 30.0))
    mid = (start[0] + first * c, start[1] + first * s)
    if bend and draw(st.booleans()):
        turn = draw(st.floats(-math.pi / 2, math.pi / 2).filter(lambda a: abs(a) > 0.05))
        h2 = heading + turn
        second = draw(st.floats(10.0, 50.0))
        end = (mid[0] + second * math.cos(h2), mid[1] + second * math.sin(h2))
        return Path([start, mid, end])
    return Path([start, mid])


footprints = st.builds(Footprint, st.floats(3.5, 12.0), st.floats(1.6, 2.6))


@st.composite
def agents(draw, agent_id, bend=True, v_max=14.0):
    path = draw(paths(bend=bend))
    l = draw(st.floats(0.0, min(25.0, path.length)))
    v = draw(st.floats(0.0, v_max))
    return AgentState(agent_id, path, l, v, draw(footprints))


@st.composite
def scenes(draw, min_others=1, max_others=3):
    """(ego, others) with ids ego, a0, a1, ..."""
    n = draw(st.integers(min_others, max_others))
    ego = draw(agents("ego"))
    others = [draw(agents(f"a{i}")) for i in range(n)]
    return ego, others


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    ran = [item for item in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])
           if "test_acceptance" in item.nodeid]
    if not ran and not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 9):
        terminalreporter.write_line(ACCEPTANCE.get(n, f"ACCEPTANCE {n} FAIL not run or errored before reporting"))
