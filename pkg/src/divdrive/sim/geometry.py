"""Planar geometry: oriented rectangles, ray casting, separating-axis tests."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RAY_MAX = 50.0


@dataclass(frozen=True)
class Rect:
    """Oriented rectangle; ``length`` runs along ``angle``, ``width`` across it."""

    cx: float
    cy: float
    length: float
    width: float
    angle: float = 0.0

    @classmethod
    def from_bounds(cls, xmin, ymin, xmax, ymax) -> "Rect":
        return cls((xmin + xmax) / 2, (ymin + ymax) / 2, xmax - xmin, ymax - ymin, 0.0)

    @classmethod
    def from_dict(cls, d) -> "Rect":
        if "bounds" in d:
            return cls.from_bounds(*d["bounds"])
        return cls(d["center"][0], d["center"][1], d["length"], d["width"], d.get("angle", 0.0))

    def to_dict(self) -> dict:
        return {"center": [self.cx, self.cy], "length": self.length,
                "width": self.width, "angle": self.angle}

    def corners(self) -> np.ndarray:
        return rect_corners(self.cx, self.cy, self.angle, self.length / 2, self.width / 2)

    def segments(self) -> np.ndarray:
        c = self.corners()
        return np.hstack([c, np.roll(c, -1, axis=0)])

    def contains(self, x: float, y: float) -> bool:
        dx, dy = x - self.cx, y - self.cy
        c, s = math.cos(self.angle), math.sin(self.angle)
        return abs(dx * c + dy * s) <= self.length / 2 and abs(-dx * s + dy * c) <= self.width / 2


def rect_corners(cx, cy, theta, half_len, half_wid) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    ux, uy = c * half_len, s * half_len
    vx, vy = -s * half_wid, c * half_wid
    return np.array([
        [cx + ux + vx, cy + uy + vy],
        [cx - ux + vx, cy - uy + vy],
        [cx - ux - vx, cy - uy - vy],
        [cx + ux - vx, cy + uy - vy],
    ])


def corners_to_segments(corners: np.ndarray) -> np.ndarray:
    return np.hstack([corners, np.roll(corners, -1, axis=0)])


def ray_directions(n: int, heading: float) -> np.ndarray:
    ang = heading + 2 * math.pi * np.arange(n) / n
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def cast_rays(ox: float, oy: float, dirs: np.ndarray, segs: np.ndarray,
              max_dist: float = RAY_MAX) -> np.ndarray:
    """Distance along each ray to the nearest segment hit, capped at ``max_dist``.

    ``dirs`` is (R, 2) unit vectors, ``segs`` is (N, 4) rows ``x1, y1, x2, y2``.
    Segments parallel to a ray are treated as missed.
    """
    out = np.full(len(dirs), max_dist)
    if len(segs) == 0:
        return out
    ex = segs[:, 2] - segs[:, 0]
    ey = segs[:, 3] - segs[:, 1]
    wx = segs[:, 0] - ox
    wy = segs[:, 1] - oy
    dx = dirs[:, 0:1]
    dy = dirs[:, 1:2]
    denom = dx * ey - dy * ex  # (R, N)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (wx * ey - wy * ex) / denom
        u = (wx * dy - wy * dx) / denom
    ok = (np.abs(denom) > 1e-12) & (s >= 0.0) & (u >= 0.0) & (u <= 1.0)
    s = np.where(ok, s, max_dist)
    return np.minimum(out, s.min(axis=1))


def point_segment_distance(px: float, py: float, segs: np.ndarray) -> np.ndarray:
    ex = segs[:, 2] - segs[:, 0]
    ey = segs[:, 3] - segs[:, 1]
    l2 = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((px - segs[:, 0]) * ex + (py - segs[:, 1]) * ey) / l2
    t = np.where(l2 > 0, np.clip(t, 0.0, 1.0), 0.0)
    qx = segs[:, 0] + t * ex - px
    qy = segs[:, 1] + t * ey - py
    return np.hypot(qx, qy)


def rects_overlap(a, b) -> bool:
    """Separating-axis test between two convex quadrilaterals given by corners."""
    a = [(float(p[0]), float(p[1])) for p in a]
    b = [(float(p[0]), float(p[1])) for p in b]
    for poly in (a, b):
        for i in range(2):
            ex = poly[i + 1][0] - poly[i][0]
            ey = poly[i + 1][1] - poly[i][1]
            nx, ny = -ey, ex
            pa = [x * nx + y * ny for x, y in a]
            pb = [x * nx + y * ny for x, y in b]
            if max(pa) < min(pb) or max(pb) < min(pa):
                return False
    return True


def rect_hits_segments(corners: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Which segments intersect the convex rectangle (SAT, vectorized over segments)."""
    if len(segs) == 0:
        return np.zeros(0, dtype=bool)
    p1 = segs[:, 0:2]
    p2 = segs[:, 2:4]
    hit = np.ones(len(segs), dtype=bool)
    # rectangle edge normals
    for i in range(2):
        e = corners[i + 1] - corners[i]
        axis = np.array([-e[1], e[0]])
        rp = corners @ axis
        s1 = p1 @ axis
        s2 = p2 @ axis
        smin = np.minimum(s1, s2)
        smax = np.maximum(s1, s2)
        hit &= ~((smax < rp.min()) | (smin > rp.max()))
    # segment normals
    nx = -(p2[:, 1] - p1[:, 1])
    ny = p2[:, 0] - p1[:, 0]
    sp = p1[:, 0] * nx + p1[:, 1] * ny
    cp = corners[:, 0:1] * nx + corners[:, 1:2] * ny  # (4, N)
    hit &= ~((cp.max(axis=0) < sp) | (cp.min(axis=0) > sp))
    return hit


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2 * math.pi)
    if a <= 0:
        a += 2 * math.pi
    return a - math.pi
