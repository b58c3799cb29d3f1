"""Reachability areas on agent paths and the pairwise overlap check."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from shapely.geometry import LineString
from shapely.geometry.base import BaseGeometry

from .encounter import AgentState, CollisionPoint

_TOL = 1e-9


@dataclass(frozen=True)
class ReachConfig:
    """Knobs for turning collision points into areas.

    ``horizon`` and ``slack`` cap the interval when nothing constrains it;
    ``margin`` lengthens constrained intervals; ``extend_by_length`` adds half
    the vehicle length at both ends (off gives the width-only reading).
    """

    horizon: float = 10.0
    slack: float = 5.0
    margin: float = 0.0
    extend_by_length: bool = True

    def __post_init__(self):
        if self.horizon <= 0 or self.slack < 0 or self.margin < 0:
            raise ValueError("horizon must be > 0; slack and margin must be >= 0")


@dataclass(frozen=True)
class ReachInterval:
    agent_id: Hashable
    l_start: float
    l_end: float
    limiting_agent: Optional[Hashable] = None

    @property
    def length(self) -> float:
        return self.l_end - self.l_start


@dataclass(frozen=True)
class ReachArea:
    interval: ReachInterval
    polygon: BaseGeometry  # a polygon; a zero-area line for an empty width-only interval


def _id_key(x):
    return (type(x).__name__, x)


def reach_interval(
    agent: AgentState,
    collision_points: Sequence[CollisionPoint],
    cfg: ReachConfig = ReachConfig(),
) -> ReachInterval:
    """Interval from the agent's position to its nearest collision point."""
    for cp in collision_points:
        if cp.observer_id != agent.id:
            raise ValueError(f"collision point observed by {cp.observer_id!r} passed for agent {agent.id!r}")
        if cp.l_coll < agent.l - _TOL:
            raise ValueError(
                f"collision point at l={cp.l_coll} lies behind agent {agent.id!r} at l={agent.l}"
            )
    # nothing lets the interval outgrow what the agent can cover in the horizon
    cap = min(agent.path.length, agent.l + agent.v * cfg.horizon + cfg.slack)
    if not collision_points:
        return ReachInterval(agent.id, agent.l, cap, None)
    nearest = min(collision_points, key=lambda cp: (cp.l_coll, _id_key(cp.other_id)))
    l_end = min(cap, max(nearest.l_coll, agent.l) + cfg.margin)
    return ReachInterval(agent.id, agent.l, l_end, nearest.other_id)


def widen(interval: ReachInterval, agent: AgentState, cfg: ReachConfig = ReachConfig()) -> ReachArea:
    """Sweep the interval with the agent's width (and half-length at both ends)."""
    fp = agent.footprint
    path = agent.path
    ext = 0.5 * fp.length if cfg.extend_by_length else 0.0
    if ext == 0.0 and interval.l_end - interval.l_start <= _TOL:
        # width-only and empty: the cross-section at the agent, zero area
        x, y, h = path.point_at(interval.l_start)
        dx, dy = -0.5 * fp.width * math.sin(h), 0.5 * fp.width * math.cos(h)
        return ReachArea(interval, LineString([(x - dx, y - dy), (x + dx, y + dy)]))
    # always swept along the path, so a shorter interval gives a subset
    pts = path.slice_points(interval.l_start - ext, interval.l_end + ext)
    poly = LineString(pts).buffer(0.5 * fp.width, cap_style="flat", join_style="mitre")
    return ReachArea(interval, poly)


def overlaps(a: ReachArea, b: ReachArea) -> bool:
    """True when the areas share any point; touching boundaries count."""
    return bool(a.polygon.intersects(b.polygon))
