"""Fixed-step kinematic simulation.

Other agents follow scripted piecewise-constant accelerations and ignore
everyone else. The ego replans every step (filter + planner, or planner only
in baseline mode) and executes the first acceleration of the chosen profile.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Hashable, Optional, TextIO

from .encounter import AgentState, EncounterConfig
from .filtering import FilterReport, run_filter
from .geometry import _rect_distance
from .planner import PlannerConfig, cost_table, score_all, select, v_max_for
from .reachability import ReachConfig

TRACE_CSV_COLUMNS = [
    "time", "agent_id", "l", "v", "a", "x", "y", "heading", "ego_distance",
    "filtered", "profile_id", "cost_total", "cost_min", "cost_max",
]


class Mode(str, enum.Enum):
    RISK_SHADOWING = "risk_shadowing"
    BASELINE = "baseline"


class SimulationError(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class AgentSpec:
    state: AgentState
    # (t_start, acceleration) pairs; acceleration holds until the next entry
    schedule: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        sched = tuple((float(t), float(a)) for t, a in self.schedule)
        if any(t1 <= t0 for (t0, _), (t1, _) in zip(sched, sched[1:])):
            raise ValueError(f"agent {self.state.id}: schedule times must increase")
        object.__setattr__(self, "schedule", sched)

    @property
    def id(self):
        return self.state.id

    def accel_at(self, t: float) -> float:
        a = 0.0
        for t_start, acc in self.schedule:
            if t_start <= t + 1e-9:
                a = acc
            else:
                break
        return a


@dataclass(frozen=True)
class Scenario:
    name: str
    agents: tuple[AgentSpec, ...]
    ego_id: Hashable
    duration: float = 10.0
    dt_sim: float = 0.1
    mode: Mode = Mode.RISK_SHADOWING
    encounter_cfg: EncounterConfig = EncounterConfig()
    planner_cfg: PlannerConfig = PlannerConfig()
    reach_cfg: ReachConfig = ReachConfig()
    filter_enabled: bool = True
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "mode", Mode(self.mode))
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValueError(f"scenario {self.name}: duplicate agent ids {ids}")
        if self.ego_id not in ids:
            raise ValueError(f"scenario {self.name}: ego id {self.ego_id!r} not among agents")
        if self.dt_sim <= 0 or self.duration <= 0:
            raise ValueError("duration and dt_sim must be positive")

    @property
    def ego(self) -> AgentSpec:
        return next(a for a in self.agents if a.id == self.ego_id)

    @property
    def others(self) -> list[AgentSpec]:
        return [a for a in self.agents if a.id != self.ego_id]

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt_sim))

    def replace(self, **kw) -> "Scenario":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class AgentRecord:
    l: float
    v: float
    a: float
    x: float
    y: float
    heading: float
    ego_distance: Optional[float]


@dataclass(frozen=True)
class StepRecord:
    time: float
    agents: dict
    report: Optional[FilterReport] = None
    profile_id: Optional[int] = None
    profile: Optional[tuple[float, float, float]] = None  # (a1, t_switch, a2)
    cost_total: float = math.nan
    cost_min: float = math.nan
    cost_max: float = math.nan

    def filtered(self, agent_id) -> bool:
        if self.report is None:
            return False
        try:
            return self.report.decision(agent_id).filtered
        except KeyError:
            return False


@dataclass
class SimTrace:
    scenario: str
    mode: Mode
    ego_id: Hashable
    records: list = field(default_factory=list)

    def times(self) -> list[float]:
        return [r.time for r in self.records]

    def series(self, agent_id, attr: str) -> list[float]:
        return [getattr(r.agents[agent_id], attr) for r in self.records]

    def ego_accel(self) -> list[float]:
        return self.series(self.ego_id, "a")

    def min_ego_distance(self) -> float:
        vals = [rec.ego_distance for r in self.records for k, rec in r.agents.items() if k != self.ego_id]
        return min(vals) if vals else math.inf

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_CSV_COLUMNS)
        for r in self.records:
            for aid, a in r.agents.items():
                is_ego = aid == self.ego_id
                writer.writerow([
                    f"{r.time:.3f}", aid, f"{a.l:.6f}", f"{a.v:.6f}", f"{a.a:.6f}",
                    f"{a.x:.6f}", f"{a.y:.6f}", f"{a.heading:.6f}",
                    "" if a.ego_distance is None else f"{a.ego_distance:.6f}",
                    "" if is_ego or r.report is None else ("1" if r.filtered(aid) else "0"),
                    r.profile_id if is_ego else "",
                    f"{r.cost_total:.6f}" if is_ego else "",
                    f"{r.cost_min:.6f}" if is_ego else "",
                    f"{r.cost_max:.6f}" if is_ego else "",
                ])


def integrate(l: float, v: float, a: float, dt: float, l_max: float, v_cap: float = math.inf) -> tuple[float, float]:
    """Advance (l, v) by one step of constant acceleration, exactly.

    Speed saturates at 0 and ``v_cap``; an agent reaching the path end stops there.
    """
    v_new = v + a * dt
    if v_new < 0.0:
        tau = v / -a
        dl = 0.5 * v * tau
        v_new = 0.0
    elif v_new > v_cap and a > 0:
        tau = max(0.0, (v_cap - v) / a)
        dl = 0.5 * (v + v_cap) * tau + v_cap * (dt - tau)
        v_new = v_cap
    else:
        dl = 0.5 * (v + v_new) * dt
    l_new = l + dl
    if l_new >= l_max:
        return l_max, 0.0
    return l_new, v_new


@dataclass(frozen=True)
class SimState:
    t: float
    step_index: int
    agents: tuple[AgentState, ...]


def initial_state(scenario: Scenario) -> SimState:
    return SimState(0.0, 0, tuple(a.state for a in scenario.agents))


def _planner_cfg(scenario: Scenario) -> PlannerConfig:
    cfg = scenario.planner_cfg
    if cfg.v_ref is None:
        # keep the speed the ego started with, not whatever it drifted to
        cfg = dataclasses.replace(cfg, v_ref=scenario.ego.state.v)
    return cfg


def step(scenario: Scenario, state: SimState, mode: Optional[Mode] = None) -> tuple[SimState, StepRecord]:
    """Plan and act for one step of length dt_sim starting at ``state.t``."""
    if state.t >= scenario.duration - 1e-9:
        raise ValueError(f"time {state.t} is not before the scenario end {scenario.duration}")
    mode = Mode(mode or scenario.mode)
    dt = scenario.dt_sim
    specs = {a.id: a for a in scenario.agents}
    ego = next(a for a in state.agents if a.id == scenario.ego_id)
    others = [a for a in state.agents if a.id != scenario.ego_id]

    report = None
    considered = others
    if mode is Mode.RISK_SHADOWING and scenario.filter_enabled and others:
        report = run_filter(ego, others, scenario.encounter_cfg, scenario.reach_cfg, timestamp=state.t)
        dropped = set(report.filtered_ids)
        considered = [o for o in others if o.id not in dropped]

    pcfg = _planner_cfg(scenario)
    try:
        profiles = score_all(ego, considered, pcfg)
        chosen = select(profiles)
    except ValueError as exc:
        raise SimulationError(state.step_index, str(exc)) from exc
    cmin, cmax = cost_table(profiles)

    new_agents = []
    records = {}
    ex, ey, eh = ego.path.point_at(ego.l)
    for ag in state.agents:
        if ag.id == scenario.ego_id:
            acc = chosen.a1
            v_cap = max(v_max_for(ego, pcfg), ego.v)
        else:
            acc = specs[ag.id].accel_at(state.t)
            v_cap = math.inf
        l_new, v_new = integrate(ag.l, ag.v, acc, dt, ag.path.length, v_cap)
        x, y, h = ag.path.point_at(ag.l)
        dist = None
        if ag.id != scenario.ego_id:
            dist = _rect_distance(ex, ey, eh, ego.footprint, x, y, h, ag.footprint)
        records[ag.id] = AgentRecord(ag.l, ag.v, (v_new - ag.v) / dt, x, y, h, dist)
        new_agents.append(dataclasses.replace(ag, l=l_new, v=v_new))

    rec = StepRecord(
        time=state.t, agents=records, report=report, profile_id=chosen.id,
        profile=(chosen.a1, chosen.t_switch, chosen.a2), cost_total=chosen.cost.total,
        cost_min=cmin, cost_max=cmax,
    )
    nxt = SimState(round((state.step_index + 1) * dt, 9), state.step_index + 1, tuple(new_agents))
    return nxt, rec


def run(scenario: Scenario, mode: Optional[Mode | str] = None) -> SimTrace:
    mode = Mode(mode or scenario.mode)
    trace = SimTrace(scenario.name, mode, scenario.ego_id)
    state = initial_state(scenario)
    for _ in range(scenario.n_steps):
        state, rec = step(scenario, state, mode)
        trace.records.append(rec)
    return trace
