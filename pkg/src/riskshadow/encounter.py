"""Closest-encounter risk model.

Both agents are propagated along their own paths at constant speed, the
rectangle distance d(s) is traced over the prediction horizon, and its global
minimum gives the distance/time/point of closest encounter. A closest encounter
nearer than ``d_thr`` becomes a collision point on the observer's path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Optional

import numpy as np

from .geometry import Footprint, Path, Pose2D, _rect_distance, rectangle_distances

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_TIE = 1e-9


@dataclass(frozen=True)
class AgentState:
    id: Hashable
    path: Path
    l: float
    v: float
    footprint: Footprint

    def __post_init__(self):
        if not (-1e-9 <= self.l <= self.path.length + 1e-9):
            raise ValueError(f"agent {self.id}: arc-length {self.l} outside [0, {self.path.length}]")
        if not (math.isfinite(self.v) and self.v >= 0):
            raise ValueError(f"agent {self.id}: speed must be finite and >= 0, got {self.v}")

    def l_at(self, s):
        """Arc-length after ``s`` seconds at constant speed; stops at the path end."""
        return np.minimum(self.l + self.v * np.asarray(s, dtype=float), self.path.length)

    @property
    def pose(self) -> Pose2D:
        return Pose2D(*self.path.point_at(self.l))


@dataclass(frozen=True)
class EncounterConfig:
    d_thr: float = 1.0
    horizon: float = 10.0
    dt_pred: float = 0.1

    def __post_init__(self):
        # d_thr = 0 is allowed: it disables collision points entirely.
        if self.d_thr < 0 or self.horizon <= 0 or self.dt_pred <= 0:
            raise ValueError("horizon and dt_pred must be > 0, d_thr >= 0")
        if self.dt_pred > self.horizon:
            raise ValueError(f"dt_pred {self.dt_pred} exceeds horizon {self.horizon}")

    def sample_times(self) -> np.ndarray:
        n = int(math.floor(self.horizon / self.dt_pred + 1e-9))
        s = np.arange(n + 1) * self.dt_pred
        if self.horizon - s[-1] > 1e-9:
            s = np.append(s, self.horizon)
        return s


@dataclass(frozen=True)
class EncounterResult:
    dce: float
    tce: float
    pce: Pose2D
    pce_l: float


@dataclass(frozen=True)
class CollisionPoint:
    observer_id: Hashable
    other_id: Hashable
    x_coll: Pose2D
    l_coll: float
    tce: float


def predict_position(agent: AgentState, s: float) -> Pose2D:
    if s < 0:
        raise ValueError(f"prediction time must be >= 0, got {s}")
    return Pose2D(*agent.path.point_at(float(agent.l_at(s))))


def predict_positions(agent: AgentState, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized constant-velocity prediction: (x, y, heading) arrays."""
    return agent.path.points_at(agent.l_at(s))


def distance_trace(a: AgentState, b: AgentState, s) -> np.ndarray:
    """d(s) between the predicted rectangles of ``a`` and ``b``."""
    xa, ya, ha = predict_positions(a, s)
    xb, yb, hb = predict_positions(b, s)
    return rectangle_distances(xa, ya, ha, a.footprint, xb, yb, hb, b.footprint)


def _pruned_trace(a: AgentState, b: AgentState, s: np.ndarray, slack: float) -> np.ndarray:
    """d(s), exact wherever it can lie within ``slack`` of the minimum.

    Elsewhere the center-distance lower bound is returned, which already
    exceeds the minimum by more than ``slack``.
    """
    xa, ya, ha = predict_positions(a, s)
    xb, yb, hb = predict_positions(b, s)
    center = np.hypot(xb - xa, yb - ya)
    lower = center - a.footprint.half_diagonal - b.footprint.half_diagonal
    exact = lower <= center.min() + slack
    d = lower.copy()
    d[exact] = rectangle_distances(
        xa[exact], ya[exact], ha[exact], a.footprint, xb[exact], yb[exact], hb[exact], b.footprint
    )
    return d


def _distance_at(a: AgentState, b: AgentState, s: float) -> float:
    xa, ya, ha = a.path.point_at(a.l + a.v * s)
    xb, yb, hb = b.path.point_at(b.l + b.v * s)
    return _rect_distance(xa, ya, ha, a.footprint, xb, yb, hb, b.footprint)


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _first_reaching(f, lo: float, hi: float, level: float, tol: float = 1e-4) -> float:
    """Earliest s in (lo, hi] with f(s) <= level, assuming f(lo) > level >= f(hi)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) <= level:
            hi = mid
        else:
            lo = mid
    return hi


def closest_encounter(a: AgentState, b: AgentState, cfg: EncounterConfig, refine_tol: float = 1e-3) -> EncounterResult:
    """DCE, TCE and PCE (pose of ``a``) over the prediction horizon.

    d(s) is sampled every ``dt_pred``; every sampled local minimum that could
    still hold the global minimum is refined by golden-section search on its
    bracket. Equal distances resolve to the earliest time.
    """
    s = cfg.sample_times()
    # a sampled value can undershoot its neighbours by at most the closing speed times one step
    slack = (a.v + b.v) * cfg.dt_pred + _TIE
    d = _pruned_trace(a, b, s, slack)
    d_min = float(d.min())

    def f(t):
        return _distance_at(a, b, t)

    n = len(s)
    # a plateau is represented by its first sample only
    candidates = [
        i for i in range(n)
        if d[i] <= d_min + slack
        and (i == 0 or d[i] < d[i - 1] - _TIE)
        and (i == n - 1 or d[i] <= d[i + 1] + _TIE)
    ] or [int(np.argmin(d))]
    best_s, best_d = None, math.inf
    for i in candidates:
        lo = s[i - 1] if i > 0 else s[i]
        hi = s[i + 1] if i < n - 1 else s[i]
        cand_s, cand_d = float(s[i]), float(d[i])
        if hi > lo and cand_d > 0.0:
            gs, gd = _golden_min(f, lo, hi, refine_tol)
            if gd < cand_d - _TIE:
                cand_s, cand_d = gs, gd
        # earliest time attaining the bracket minimum (contact or standstill plateaus)
        probe = max(lo, cand_s - refine_tol)
        if i > 0 and probe < cand_s and f(probe) <= cand_d + _TIE and f(lo) > cand_d + _TIE:
            cand_s = _first_reaching(f, lo, probe, cand_d + _TIE)
            cand_d = min(cand_d, f(cand_s))
        if cand_d < best_d - _TIE or (abs(cand_d - best_d) <= _TIE and cand_s < best_s):
            best_s, best_d = cand_s, cand_d

    best_s = float(best_s)
    pce_l = float(a.l_at(best_s))
    return EncounterResult(dce=float(best_d), tce=best_s, pce=Pose2D(*a.path.point_at(pce_l)), pce_l=pce_l)


def collision_point(observer: AgentState, other: AgentState, cfg: EncounterConfig) -> Optional[CollisionPoint]:
    res = closest_encounter(observer, other, cfg)
    if not res.dce < cfg.d_thr:
        return None
    return CollisionPoint(observer.id, other.id, res.pce, res.pce_l, res.tce)
