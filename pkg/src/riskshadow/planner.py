"""Velocity-profile planner: enumerate two-phase acceleration profiles, score
each by risk - utility + comfort, keep the cheapest."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .encounter import AgentState, predict_positions
from .geometry import rectangle_distances

V_MAX_FACTOR = 1.5
V_MAX_FLOOR = 10.0


@dataclass(frozen=True)
class PlannerConfig:
    horizon: float = 8.0
    dt: float = 0.2
    accel_grid: tuple[float, ...] = (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0)
    switch_times: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0)
    w_R: float = 10.0
    w_U: float = 0.02
    w_O: float = 0.05
    risk_scale_d0: float = 4.0
    # extra risk, in units of w_R, for a profile that touches another agent
    contact_penalty: float = 100.0
    curve_risk_enabled: bool = False
    a_lat_max: float = 3.0
    # speed keeping: w_V * sum (v - v_ref)^2 dt, part of the comfort term.
    # v_ref=None means "the ego's current speed".
    w_V: float = 0.05
    v_ref: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "accel_grid", tuple(float(a) for a in self.accel_grid))
        object.__setattr__(self, "switch_times", tuple(float(t) for t in self.switch_times))
        if self.horizon <= 0 or self.dt <= 0:
            raise ValueError("planner horizon and dt must be positive")
        if not self.accel_grid or not self.switch_times:
            raise ValueError("accel_grid and switch_times must be non-empty")
        if 0.0 not in self.accel_grid:
            raise ValueError("accel_grid must contain 0 (the constant-velocity profile)")
        if self.risk_scale_d0 <= 0:
            raise ValueError("risk_scale_d0 must be positive")
        if min(self.w_R, self.w_U, self.w_O, self.w_V, self.contact_penalty) < 0:
            raise ValueError("cost weights must be >= 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def scaled(self, factor: float) -> "PlannerConfig":
        from dataclasses import replace
        return replace(self, w_R=self.w_R * factor, w_U=self.w_U * factor,
                       w_O=self.w_O * factor, w_V=self.w_V * factor)


@dataclass(frozen=True)
class CostBreakdown:
    risk: float
    utility: float
    comfort: float

    @property
    def total(self) -> float:
        return self.risk - self.utility + self.comfort


@dataclass(frozen=True, eq=False)
class VelocityProfile:
    id: int
    a1: float
    t_switch: float
    a2: float
    t: np.ndarray
    v: np.ndarray
    l: np.ndarray
    cost: Optional[CostBreakdown] = field(default=None, compare=False)

    @property
    def accel_segments(self) -> tuple[tuple[float, float], ...]:
        horizon = float(self.t[-1])
        return ((self.t_switch, self.a1), (horizon - self.t_switch, self.a2))

    @property
    def accel(self) -> np.ndarray:
        """Effective per-step acceleration, including standstill/v_max clamping."""
        return np.diff(self.v) / np.diff(self.t)

    @property
    def is_constant(self) -> bool:
        return self.a1 == 0.0 and self.a2 == 0.0

    def with_cost(self, cost: CostBreakdown) -> "VelocityProfile":
        return VelocityProfile(self.id, self.a1, self.t_switch, self.a2, self.t, self.v, self.l, cost)


def v_max_for(ego: AgentState, cfg: PlannerConfig) -> float:
    v0 = ego.v if cfg.v_ref is None else cfg.v_ref
    return max(V_MAX_FLOOR, V_MAX_FACTOR * v0)


@dataclass(frozen=True)
class _Batch:
    a1: np.ndarray
    t_switch: np.ndarray
    a2: np.ndarray
    t: np.ndarray
    v: np.ndarray  # (P, K+1)
    l: np.ndarray  # (P, K+1)


def _profile_batch(ego: AgentState, cfg: PlannerConfig) -> _Batch:
    combos = list(itertools.product(cfg.accel_grid, cfg.switch_times, cfg.accel_grid))
    if not combos:
        raise ValueError("empty profile set")
    a1, ts, a2 = (np.array(c, dtype=float) for c in zip(*combos))
    t = cfg.times()
    v_max = v_max_for(ego, cfg)
    # per-step velocity increment, splitting the step that contains the switch
    t0, t1 = t[:-1], t[1:]
    before = np.clip(ts[:, None] - t0[None, :], 0.0, cfg.dt)
    dv = a1[:, None] * before + a2[:, None] * (cfg.dt - before)
    v = np.empty((len(combos), len(t)))
    v[:, 0] = ego.v
    for k in range(len(t) - 1):
        v[:, k + 1] = np.clip(v[:, k] + dv[:, k], 0.0, max(v_max, ego.v))
    l = ego.l + np.concatenate([np.zeros((len(combos), 1)), np.cumsum(0.5 * (v[:, 1:] + v[:, :-1]) * cfg.dt, axis=1)], axis=1)
    return _Batch(a1, ts, a2, t, v, l)


def generate_profiles(ego: AgentState, cfg: PlannerConfig) -> list[VelocityProfile]:
    """One profile per (a1, t_switch, a2): a1 until t_switch, then a2 to the horizon."""
    b = _profile_batch(ego, cfg)
    return [
        VelocityProfile(i, float(b.a1[i]), float(b.t_switch[i]), float(b.a2[i]), b.t, b.v[i], b.l[i])
        for i in range(len(b.a1))
    ]


def _min_distance_rows(ego: AgentState, ex, ey, eh, other: AgentState, t: np.ndarray) -> np.ndarray:
    """Per-profile minimum rectangle distance to ``other`` over the horizon.

    Only samples whose center-distance lower bound can beat the row's best
    center distance get the exact rectangle evaluation.
    """
    ox, oy, oh = predict_positions(other, t)
    ox, oy, oh = (np.broadcast_to(arr, ex.shape) for arr in (ox, oy, oh))
    center = np.hypot(ex - ox, ey - oy)
    lower = center - ego.footprint.half_diagonal - other.footprint.half_diagonal
    exact = lower <= center.min(axis=1, keepdims=True)
    d = np.full(ex.shape, np.inf)
    d[exact] = rectangle_distances(ex[exact], ey[exact], eh[exact], ego.footprint,
                                   ox[exact], oy[exact], oh[exact], other.footprint)
    return d.min(axis=1)


def _risk(ego: AgentState, l: np.ndarray, t: np.ndarray, others: Sequence[AgentState], cfg: PlannerConfig) -> np.ndarray:
    """Proximity risk per profile; ``l`` has shape (P, K+1).

    exp(-d/d0) peaks where d is smallest, so each agent contributes
    exp(-min_t d / d0), plus ``contact_penalty`` if the rectangles touch.
    """
    total = np.zeros(l.shape[0])
    if not others:
        return total
    ex, ey, eh = ego.path.points_at(l)
    for oth in others:
        d = _min_distance_rows(ego, ex, ey, eh, oth, t)
        total += np.exp(-d / cfg.risk_scale_d0) + cfg.contact_penalty * (d <= 0.0)
    return cfg.w_R * total


def _curve_risk(ego: AgentState, v: np.ndarray, l: np.ndarray, cfg: PlannerConfig) -> np.ndarray:
    kappa = ego.path.turn_curvature(l)
    excess = np.maximum(0.0, v * v * kappa - cfg.a_lat_max)
    return cfg.w_R * excess.sum(axis=1) * cfg.dt


def _comfort(v: np.ndarray, v_ref: float, cfg: PlannerConfig) -> np.ndarray:
    a = np.diff(v, axis=1) / cfg.dt
    jerk = np.diff(a, axis=1) / cfg.dt
    cost = cfg.w_O * ((a * a).sum(axis=1) + (jerk * jerk).sum(axis=1)) * cfg.dt
    if cfg.w_V > 0:
        dev = v[:, 1:] - v_ref
        cost = cost + cfg.w_V * (dev * dev).sum(axis=1) * cfg.dt
    return cost


def _score_batch(ego: AgentState, v, l, t, others, cfg: PlannerConfig):
    risk = _risk(ego, l, t, others, cfg)
    if cfg.curve_risk_enabled:
        risk = risk + _curve_risk(ego, v, l, cfg)
    utility = cfg.w_U * (l[:, -1] - l[:, 0])
    comfort = _comfort(v, ego.v if cfg.v_ref is None else cfg.v_ref, cfg)
    return risk, utility, comfort


def score_profile(
    profile: VelocityProfile,
    others: Sequence[AgentState],
    cfg: PlannerConfig,
    ego: AgentState,
) -> CostBreakdown:
    """Risk, utility and comfort of one profile driven by ``ego`` along its path."""
    r, u, c = _score_batch(ego, profile.v[None, :], profile.l[None, :], profile.t, others, cfg)
    return CostBreakdown(float(r[0]), float(u[0]), float(c[0]))


def score_all(ego: AgentState, others: Sequence[AgentState], cfg: PlannerConfig) -> list[VelocityProfile]:
    """All candidate profiles with their costs attached."""
    b = _profile_batch(ego, cfg)
    r, u, c = _score_batch(ego, b.v, b.l, b.t, others, cfg)
    return [
        VelocityProfile(i, float(b.a1[i]), float(b.t_switch[i]), float(b.a2[i]), b.t, b.v[i], b.l[i],
                        CostBreakdown(float(r[i]), float(u[i]), float(c[i])))
        for i in range(len(b.a1))
    ]


def select(profiles: Sequence[VelocityProfile]) -> VelocityProfile:
    """Cheapest profile; near-ties go to lower risk, then gentler a1, then lower id."""
    if not profiles:
        raise ValueError("no candidate profiles to choose from")
    best = min(p.cost.total for p in profiles)
    tol = 1e-9 * max(1.0, abs(best))
    tied = [p for p in profiles if p.cost.total <= best + tol]
    return min(tied, key=lambda p: (p.cost.risk, abs(p.a1), p.id))


def plan(ego: AgentState, others: Sequence[AgentState], cfg: PlannerConfig) -> VelocityProfile:
    return select(score_all(ego, others, cfg))


def cost_table(profiles: Sequence[VelocityProfile]) -> tuple[float, float]:
    totals = [p.cost.total for p in profiles]
    return (min(totals), max(totals)) if totals else (math.nan, math.nan)
