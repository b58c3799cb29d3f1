import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskshadow.encounter import AgentState, EncounterConfig
from riskshadow.planner import PlannerConfig
from riskshadow.simulator import (
    TRACE_CSV_COLUMNS, AgentSpec, Mode, Scenario, initial_state, integrate, run, step,
)

from .conftest import CAR, agents, straight


def test_integrate_closed_forms():
    assert integrate(0.0, 10.0, 2.0, 0.5, 100.0) == pytest.approx((5.25, 11.0))
    # braking to a stop inside the step: v^2 / 2a
    assert integrate(0.0, 1.0, -4.0, 1.0, 100.0) == pytest.approx((0.125, 0.0))
    # capped: reach 12 after 1 s, then cruise 1 s
    assert integrate(0.0, 10.0, 2.0, 2.0, 100.0, v_cap=12.0) == pytest.approx((11.0 + 12.0, 12.0))
    # path end stops the agent
    assert integrate(95.0, 10.0, 0.0, 1.0, 100.0) == (100.0, 0.0)


def test_schedule_lookup():
    spec = AgentSpec(AgentState("a", straight(0, 0, 0, 100), 0.0, 5.0, CAR), ((0.0, 1.0), (2.0, -1.0)))
    assert [spec.accel_at(t) for t in (0.0, 1.9, 2.0, 5.0)] == [1.0, 1.0, -1.0, -1.0]
    with pytest.raises(ValueError):
        AgentSpec(spec.state, ((1.0, 0.0), (1.0, 1.0)))


def two_car_scene(**kw):
    ego = AgentSpec(AgentState("ego", straight(-40, -1.75, 0, 200), 0.0, 8.0, CAR))
    car = AgentSpec(AgentState("car", straight(1.75, 40, -math.pi / 2, 200), 0.0, 6.0, CAR), ((0.0, 0.5),))
    return Scenario("two", (ego, car), "ego", **{"duration": 2.0, **kw})


def test_scripted_agent_follows_its_schedule():
    trace = run(two_car_scene(), Mode.BASELINE)
    v = trace.series("car", "v")
    assert v[0] == 6.0
    assert v[-1] == pytest.approx(6.0 + 0.5 * 1.9)
    assert trace.series("car", "a") == pytest.approx([0.5] * len(v))
    assert len(trace.records) == 20 and trace.times()[-1] == pytest.approx(1.9)


def test_baseline_has_no_filter_report():
    trace = run(two_car_scene(), Mode.BASELINE)
    assert all(r.report is None for r in trace.records)
    rs = run(two_car_scene(), Mode.RISK_SHADOWING)
    assert all(r.report is not None for r in rs.records)


def test_filter_disabled_behaves_like_baseline():
    a = run(two_car_scene(filter_enabled=False), Mode.RISK_SHADOWING)
    b = run(two_car_scene(), Mode.BASELINE)
    assert a.ego_accel() == b.ego_accel()


def test_step_past_end_rejected():
    sc = two_car_scene(duration=0.1)
    state, _ = step(sc, initial_state(sc))
    with pytest.raises(ValueError):
        step(sc, state)


def test_scenario_validation():
    ego = AgentSpec(AgentState("ego", straight(0, 0, 0, 100), 0.0, 8.0, CAR))
    with pytest.raises(ValueError):
        Scenario("x", (ego, ego), "ego")
    with pytest.raises(ValueError):
        Scenario("x", (ego,), "nobody")
    with pytest.raises(ValueError):
        Scenario("x", (ego,), "ego", dt_sim=0.0)


def test_trace_csv_header_and_rows():
    trace = run(two_car_scene(duration=0.3))
    buf = io.StringIO()
    trace.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].split(",") == TRACE_CSV_COLUMNS
    assert len(lines) == 1 + 3 * 2


@st.composite
def small_scenarios(draw):
    n = draw(st.integers(1, 2))
    ego = draw(agents("ego", bend=False, v_max=10.0))
    others = []
    for i in range(n):
        st_ = draw(agents(f"o{i}"))
        sched = ((0.0, draw(st.sampled_from([-1.0, 0.0, 1.0]))),)
        others.append(AgentSpec(st_, sched))
    pcfg = PlannerConfig(horizon=4.0, dt=0.4, switch_times=(1.0, 2.0))
    return Scenario("prop", (AgentSpec(ego), *others), "ego", duration=0.3, dt_sim=0.1,
                    encounter_cfg=EncounterConfig(horizon=5.0), planner_cfg=pcfg)


@given(small_scenarios(), st.sampled_from(list(Mode)))
def test_determinism_byte_identical(sc, mode):
    bufs = []
    for _ in range(2):
        buf = io.StringIO()
        run(sc, mode).write_csv(buf)
        bufs.append(buf.getvalue().encode())
    assert bufs[0] == bufs[1]
