"""Polyline paths, arc-length lookup, projection and oriented-rectangle distance."""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_MIN_SEGMENT = 1e-9
_RANGE_TOL = 1e-9


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.atan2(math.sin(theta), math.cos(theta))
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.heading):
            raise ValueError(f"heading must be finite, got {self.heading}")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Footprint:
    """Vehicle rectangle; the reference point is the rectangle center."""

    length: float
    width: float

    def __post_init__(self):
        if not (self.length > 0 and self.width > 0):
            raise ValueError(f"footprint dimensions must be positive, got {self.length}x{self.width}")

    @property
    def half_diagonal(self) -> float:
        return 0.5 * math.hypot(self.length, self.width)


class Path:
    """Arc-length parameterized polyline.

    Waypoints are stored both as a read-only numpy array (vectorized lookups)
    and as plain tuples (scalar lookups in tight loops).
    """

    def __init__(self, waypoints: Sequence[Sequence[float]]):
        pts = np.asarray(waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValueError("a path needs at least 2 two-dimensional waypoints")
        seg = np.diff(pts, axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(seg_len <= _MIN_SEGMENT):
            bad = int(np.argmin(seg_len))
            raise ValueError(f"consecutive waypoints {bad} and {bad + 1} coincide")
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        headings = np.arctan2(seg[:, 1], seg[:, 0])
        for arr in (pts, cum, seg_len, headings):
            arr.setflags(write=False)
        self.waypoints = pts
        self.cumulative_arclength = cum
        self.segment_lengths = seg_len
        self.segment_headings = headings
        self._cum = cum.tolist()
        self._pts = [tuple(p) for p in pts.tolist()]
        self._hdg = headings.tolist()

    @property
    def length(self) -> float:
        return self._cum[-1]

    def __len__(self) -> int:
        return len(self._pts)

    def __eq__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return self.waypoints.shape == other.waypoints.shape and bool(np.all(self.waypoints == other.waypoints))

    def __hash__(self):
        return hash(self.waypoints.tobytes())

    def __repr__(self):
        return f"Path({len(self)} waypoints, length={self.length:.3f})"

    def to_list(self) -> list[list[float]]:
        return [list(p) for p in self._pts]

    def _segment_index(self, l: float) -> int:
        return min(bisect_right(self._cum, l) - 1, len(self._pts) - 2)

    def point_at(self, l: float) -> tuple[float, float, float]:
        """Scalar (x, y, heading) at arc-length ``l``, clamped to the path."""
        l = min(max(l, 0.0), self._cum[-1])
        i = max(self._segment_index(l), 0)
        x0, y0 = self._pts[i]
        x1, y1 = self._pts[i + 1]
        t = (l - self._cum[i]) / (self._cum[i + 1] - self._cum[i])
        return x0 + t * (x1 - x0), y0 + t * (y1 - y0), self._hdg[i]

    def points_at(self, l) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized (x, y, heading) for an array of arc-lengths, clamped to the path."""
        l = np.clip(np.asarray(l, dtype=float), 0.0, self.length)
        idx = np.clip(np.searchsorted(self.cumulative_arclength, l, side="right") - 1, 0, len(self) - 2)
        t = (l - self.cumulative_arclength[idx]) / self.segment_lengths[idx]
        p0 = self.waypoints[idx]
        p1 = self.waypoints[idx + 1]
        x = p0[..., 0] + t * (p1[..., 0] - p0[..., 0])
        y = p0[..., 1] + t * (p1[..., 1] - p0[..., 1])
        return x, y, self.segment_headings[idx]

    def extended_point_at(self, l: float) -> tuple[float, float]:
        """Point at ``l``, extrapolating linearly past either end."""
        if l < 0.0:
            (x0, y0), h = self._pts[0], self._hdg[0]
            return x0 + l * math.cos(h), y0 + l * math.sin(h)
        if l > self.length:
            (x1, y1), h = self._pts[-1], self._hdg[-1]
            d = l - self.length
            return x1 + d * math.cos(h), y1 + d * math.sin(h)
        x, y, _ = self.point_at(l)
        return x, y

    def slice_points(self, l0: float, l1: float) -> list[tuple[float, float]]:
        """Polyline vertices covering [l0, l1]; the range may extend beyond the path ends."""
        if l1 < l0:
            raise ValueError(f"slice end {l1} precedes start {l0}")
        pts = [self.extended_point_at(l0)]
        for c, p in zip(self._cum, self._pts):
            if l0 < c < l1:
                pts.append(p)
        end = self.extended_point_at(l1)
        if math.hypot(end[0] - pts[-1][0], end[1] - pts[-1][1]) > _MIN_SEGMENT or len(pts) == 1:
            pts.append(end)
        return pts

    def turn_curvature(self, l, window: float = 5.0) -> np.ndarray:
        """Curvature estimate: absolute turn angle of vertices within +-window/2, divided by window."""
        l = np.asarray(l, dtype=float)
        if len(self) < 3:
            return np.zeros_like(l)
        turns = np.abs(np.angle(np.exp(1j * np.diff(self.segment_headings))))
        at = self.cumulative_arclength[1:-1]
        near = np.abs(l[..., None] - at) <= 0.5 * window
        return (near * turns).sum(axis=-1) / window


def position_at(path: Path, l: float) -> Pose2D:
    """Pose on ``path`` at arc-length ``l``; heading follows the containing segment."""
    if not (-_RANGE_TOL <= l <= path.length + _RANGE_TOL):
        raise ValueError(f"arc-length {l} outside path range [0, {path.length}]")
    x, y, h = path.point_at(l)
    return Pose2D(x, y, h)


def project_to_path(path: Path, p: Sequence[float]) -> tuple[float, float]:
    """Closest arc-length on ``path`` to ``p`` and the signed lateral offset (left positive).

    Points beyond either end project onto the endpoint; the offset is then the
    signed distance to that endpoint.
    """
    px, py = float(p[0]), float(p[1])
    best = (math.inf, 0.0, 0.0)  # distance, l, offset
    for i in range(len(path) - 1):
        x0, y0 = path._pts[i]
        x1, y1 = path._pts[i + 1]
        dx, dy = x1 - x0, y1 - y0
        seg_len = path._cum[i + 1] - path._cum[i]
        t = ((px - x0) * dx + (py - y0) * dy) / (seg_len * seg_len)
        t = min(max(t, 0.0), 1.0)
        fx, fy = x0 + t * dx, y0 + t * dy
        dist = math.hypot(px - fx, py - fy)
        if dist < best[0] - 1e-12:
            cross = dx * (py - fy) - dy * (px - fx)
            best = (dist, path._cum[i] + t * seg_len, dist if cross >= 0 else -dist)
    return best[1], best[2]


def rectangle_corners(x: float, y: float, heading: float, fp: Footprint) -> list[tuple[float, float]]:
    """Counter-clockwise corners of an oriented rectangle centered at (x, y)."""
    c, s = math.cos(heading), math.sin(heading)
    hl, hw = 0.5 * fp.length, 0.5 * fp.width
    ax, ay = c * hl, s * hl
    bx, by = -s * hw, c * hw
    return [
        (x + ax - bx, y + ay - by),
        (x + ax + bx, y + ay + by),
        (x - ax + bx, y - ay + by),
        (x - ax - bx, y - ay - by),
    ]


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    t = 0.0 if den == 0.0 else min(max(((px - ax) * dx + (py - ay) * dy) / den, 0.0), 1.0)
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def _separated(ca, cb) -> bool:
    """Separating-axis test over the edge normals of both rectangles."""
    for corners in (ca, cb):
        for i in (0, 1):
            ax, ay = corners[i]
            bx, by = corners[i + 1]
            nx, ny = by - ay, ax - bx
            pa = [nx * x + ny * y for x, y in ca]
            pb = [nx * x + ny * y for x, y in cb]
            if max(pa) < min(pb) or max(pb) < min(pa):
                return True
    return False


def rectangle_distance(pose_a: Pose2D, fp_a: Footprint, pose_b: Pose2D, fp_b: Footprint) -> float:
    """Minimum Euclidean distance between two oriented rectangles (0 when they overlap)."""
    return _rect_distance(pose_a.x, pose_a.y, pose_a.heading, fp_a, pose_b.x, pose_b.y, pose_b.heading, fp_b)


def _rect_distance(xa, ya, ha, fp_a, xb, yb, hb, fp_b) -> float:
    ca = rectangle_corners(xa, ya, ha, fp_a)
    cb = rectangle_corners(xb, yb, hb, fp_b)
    if not _separated(ca, cb):
        return 0.0
    # disjoint convex polygons: the gap is realized at a vertex of one of them
    best = math.inf
    for pts, poly in ((ca, cb), (cb, ca)):
        for j in range(4):
            ax, ay = poly[j]
            bx, by = poly[(j + 1) % 4]
            dx, dy = bx - ax, by - ay
            den = dx * dx + dy * dy
            for px, py in pts:
                t = ((px - ax) * dx + (py - ay) * dy) / den
                t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
                ex, ey = px - ax - t * dx, py - ay - t * dy
                d2 = ex * ex + ey * ey
                if d2 < best:
                    best = d2
    return math.sqrt(best)


# --- vectorized variants -------------------------------------------------

def rectangle_corners_array(x, y, heading, length, width) -> np.ndarray:
    """Corners with shape (..., 4, 2), counter-clockwise."""
    x, y, heading = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(heading, float))
    c, s = np.cos(heading), np.sin(heading)
    hl, hw = 0.5 * np.asarray(length, float), 0.5 * np.asarray(width, float)
    ax, ay = c * hl, s * hl
    bx, by = -s * hw, c * hw
    cx = np.stack([x + ax - bx, x + ax + bx, x - ax + bx, x - ax - bx], axis=-1)
    cy = np.stack([y + ay - by, y + ay + by, y - ay + by, y - ay - by], axis=-1)
    return np.stack([cx, cy], axis=-1)


def _cross(ox, oy, px, py, qx, qy):
    return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)


def _inside_convex_array(p, corners) -> np.ndarray:
    """p: (..., 2), corners: (..., 4, 2)."""
    a = corners
    b = np.roll(corners, -1, axis=-2)
    cr = _cross(a[..., 0], a[..., 1], b[..., 0], b[..., 1], p[..., None, 0], p[..., None, 1])
    return np.all(cr >= 0, axis=-1)


def _point_segment_distance_array(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / np.where(den == 0, 1.0, den), 0.0, 1.0)
    return np.hypot(px - ax - t * dx, py - ay - t * dy)


def rectangle_distances(xa, ya, ha, fp_a: Footprint, xb, yb, hb, fp_b: Footprint) -> np.ndarray:
    """Vectorized :func:`rectangle_distance` over broadcastable pose arrays."""
    ca = rectangle_corners_array(xa, ya, ha, fp_a.length, fp_a.width)
    cb = rectangle_corners_array(xb, yb, hb, fp_b.length, fp_b.width)
    ca, cb = np.broadcast_arrays(ca, cb)
    contained = _inside_convex_array(ca[..., 0, :], cb) | _inside_convex_array(cb[..., 0, :], ca)

    # edge i of a against edge j of b -> (..., 4, 4)
    a0 = ca[..., :, None, :]
    a1 = np.roll(ca, -1, axis=-2)[..., :, None, :]
    b0 = cb[..., None, :, :]
    b1 = np.roll(cb, -1, axis=-2)[..., None, :, :]
    a0x, a0y, a1x, a1y = a0[..., 0], a0[..., 1], a1[..., 0], a1[..., 1]
    b0x, b0y, b1x, b1y = b0[..., 0], b0[..., 1], b1[..., 0], b1[..., 1]
    o1 = _cross(a0x, a0y, a1x, a1y, b0x, b0y)
    o2 = _cross(a0x, a0y, a1x, a1y, b1x, b1y)
    o3 = _cross(b0x, b0y, b1x, b1y, a0x, a0y)
    o4 = _cross(b0x, b0y, b1x, b1y, a1x, a1y)
    crossing = np.any((o1 * o2 < 0) & (o3 * o4 < 0), axis=(-2, -1))
    d = np.minimum.reduce([
        _point_segment_distance_array(a0x, a0y, b0x, b0y, b1x, b1y),
        _point_segment_distance_array(a1x, a1y, b0x, b0y, b1x, b1y),
        _point_segment_distance_array(b0x, b0y, a0x, a0y, a1x, a1y),
        _point_segment_distance_array(b1x, b1y, a0x, a0y, a1x, a1y),
    ]).min(axis=(-2, -1))
    return np.where(contained | crossing, 0.0, d)
