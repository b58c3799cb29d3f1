"""Risk-shadowing filter over a full scene.

Every agent looks at every other agent (directed pairs), builds its
reachability area from the collision points it sees, and the ego drops the
other agents whose area never meets its own.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence, TextIO

import numpy as np

from .encounter import AgentState, CollisionPoint, EncounterConfig, closest_encounter, distance_trace
from .reachability import ReachArea, ReachConfig, overlaps, reach_interval, widen

PASSED_WINDOW = 1.0  # s over which d(s) must strictly grow for an "already passed" agent

FILTER_CSV_COLUMNS = [
    "time", "other_id", "filtered", "reason",
    "ego_ra_start", "ego_ra_end", "other_ra_start", "other_ra_end", "limiting_agent",
]


class Reason(str, enum.Enum):
    NO_OVERLAP = "no_overlap"
    OVERLAP = "overlap"
    ALREADY_PASSED = "already_passed"


@dataclass(frozen=True)
class FilterDecision:
    other_id: Hashable
    filtered: bool
    ego_area: ReachArea
    other_area: ReachArea
    reason: Reason

    def __post_init__(self):
        if self.filtered != (self.reason is Reason.NO_OVERLAP):
            raise ValueError("an agent is filtered exactly when the areas do not overlap")


@dataclass(frozen=True)
class FilterReport:
    timestamp: float
    decisions: tuple[FilterDecision, ...]
    encounter_count: int
    areas: dict = dataclasses.field(default_factory=dict, compare=False)
    collision_points: tuple[CollisionPoint, ...] = ()

    def decision(self, other_id) -> FilterDecision:
        for d in self.decisions:
            if d.other_id == other_id:
                return d
        raise KeyError(other_id)

    @property
    def filtered_ids(self) -> list:
        return [d.other_id for d in self.decisions if d.filtered]

    def rows(self) -> list[dict]:
        out = []
        for d in self.decisions:
            out.append({
                "time": f"{self.timestamp:.3f}",
                "other_id": str(d.other_id),
                "filtered": "1" if d.filtered else "0",
                "reason": d.reason.value,
                "ego_ra_start": f"{d.ego_area.interval.l_start:.6f}",
                "ego_ra_end": f"{d.ego_area.interval.l_end:.6f}",
                "other_ra_start": f"{d.other_area.interval.l_start:.6f}",
                "other_ra_end": f"{d.other_area.interval.l_end:.6f}",
                "limiting_agent": "" if d.other_area.interval.limiting_agent is None
                else str(d.other_area.interval.limiting_agent),
            })
        return out


def write_filter_csv(reports: Sequence[FilterReport], fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=FILTER_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerows(rep.rows())


def already_passed(ego: AgentState, other: AgentState, tce: float, cfg: EncounterConfig) -> bool:
    """TCE at the present and the gap strictly growing over the next second."""
    if tce != 0.0:
        return False
    s = np.arange(0.0, PASSED_WINDOW + 1e-9, cfg.dt_pred)
    d = distance_trace(ego, other, s)
    return bool(np.all(np.diff(d) > 0))


def collision_points_all(agents: Sequence[AgentState], cfg: EncounterConfig):
    """Directed all-pairs sweep. Returns (points per observer, ego-perspective TCEs, count)."""
    points = {a.id: [] for a in agents}
    tces = {}
    count = 0
    for obs in agents:
        for oth in agents:
            if oth is obs:
                continue
            res = closest_encounter(obs, oth, cfg)
            count += 1
            tces[(obs.id, oth.id)] = res.tce
            if res.dce < cfg.d_thr:
                points[obs.id].append(CollisionPoint(obs.id, oth.id, res.pce, res.pce_l, res.tce))
    return points, tces, count


def run_filter(
    ego: AgentState,
    others: Sequence[AgentState],
    cfg: EncounterConfig = EncounterConfig(),
    reach_cfg: Optional[ReachConfig] = None,
    timestamp: float = 0.0,
) -> FilterReport:
    agents = [ego, *others]
    ids = [a.id for a in agents]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate agent ids in scene: {ids}")
    reach_cfg = dataclasses.replace(reach_cfg or ReachConfig(), horizon=cfg.horizon)

    points, tces, count = collision_points_all(agents, cfg)
    areas = {a.id: widen(reach_interval(a, points[a.id], reach_cfg), a, reach_cfg) for a in agents}

    ego_area = areas[ego.id]
    decisions = []
    for oth in others:
        if already_passed(ego, oth, tces[(ego.id, oth.id)], cfg):
            reason = Reason.ALREADY_PASSED
        elif overlaps(ego_area, areas[oth.id]):
            reason = Reason.OVERLAP
        else:
            reason = Reason.NO_OVERLAP
        decisions.append(FilterDecision(oth.id, reason is Reason.NO_OVERLAP, ego_area, areas[oth.id], reason))
    cps = tuple(cp for a in agents for cp in points[a.id])
    return FilterReport(timestamp, tuple(decisions), count, areas, cps)
