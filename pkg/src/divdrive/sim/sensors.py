"""Ray observations: six distance channels of 32 rays plus recent ego controls."""
from __future__ import annotations

import math

import numpy as np

from .geometry import RAY_MAX, point_segment_distance

N_RAYS = 32
CHANNELS = ("walls", "route1", "route2", "vehicles", "straight_zones", "intersection_zones")
HISTORY = 3
OBS_DIM = N_RAYS * len(CHANNELS) + 3 * HISTORY

_BASE = 2 * math.pi * np.arange(N_RAYS) / N_RAYS
_BASE_COS = np.cos(_BASE)
_BASE_SIN = np.sin(_BASE)


def ray_dirs(heading: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit ray directions, ray 0 along the heading, evenly spaced clockwise-positive."""
    c, s = math.cos(heading), math.sin(heading)
    return c * _BASE_COS - s * _BASE_SIN, s * _BASE_COS + c * _BASE_SIN


def nearest_routes(routes: dict[str, np.ndarray], x: float, y: float, n: int = 2) -> list[str]:
    """Route names ordered by distance from the point, ties by name."""
    d = [(float(point_segment_distance(x, y, segs).min()), name) for name, segs in routes.items()]
    d.sort()
    return [name for _, name in d[:n]]


def hit_distances(x: float, y: float, dx: np.ndarray, dy: np.ndarray, segs: np.ndarray,
                  edges: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """(rays, segments) matrix of hit distances, ``RAY_MAX`` where a ray misses."""
    if edges is None:
        edges = (segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1])
    ex, ey = edges
    wx = segs[:, 0] - x
    wy = segs[:, 1] - y
    dx = dx[:, None]
    dy = dy[:, None]
    denom = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (wx * ey - wy * ex) / denom
        u = (wx * dy - wy * dx) / denom
    ok = (np.abs(denom) > 1e-12) & (s >= 0.0) & (u >= 0.0) & (u <= 1.0)
    return np.where(ok, np.minimum(s, RAY_MAX), RAY_MAX)


def ray_channels(x: float, y: float, heading: float, groups: list[np.ndarray]) -> np.ndarray:
    """Cast the 32 rays against each segment group in one pass; returns (groups, 32)."""
    dx, dy = ray_dirs(heading)
    out = np.full((len(groups), N_RAYS), RAY_MAX)
    sizes = [len(g) for g in groups]
    if sum(sizes) == 0:
        return out
    s = hit_distances(x, y, dx, dy, np.vstack([g for g in groups if len(g)]))
    start = 0
    for gi, n in enumerate(sizes):
        if n:
            out[gi] = s[:, start:start + n].min(axis=1)
            start += n
    return out


class RaySensor:
    """Observation builder for one vehicle route on one map.

    Static geometry (walls, every route, the route's zone boundaries) is
    stacked once; each call only adds the other vehicles' body edges.
    """

    def __init__(self, walls: np.ndarray, routes: dict[str, np.ndarray],
                 straight: np.ndarray, inter: np.ndarray):
        self.route_names = sorted(routes)
        parts = [walls] + [routes[r] for r in self.route_names] + [straight, inter]
        self.static = np.vstack([p.reshape(-1, 4) for p in parts])
        bounds = np.cumsum([0] + [len(p) for p in parts])
        self.walls = slice(bounds[0], bounds[1])
        self.routes = {r: slice(bounds[1 + i], bounds[2 + i]) for i, r in enumerate(self.route_names)}
        self.straight = slice(bounds[-3], bounds[-2])
        self.inter = slice(bounds[-2], bounds[-1])
        self.n_static = len(self.static)
        self.edges = (self.static[:, 2] - self.static[:, 0], self.static[:, 3] - self.static[:, 1])
        r0 = bounds[1]
        r1 = bounds[1 + len(self.route_names)]
        self.route_segs = self.static[r0:r1]
        self.route_slices = [(name, sl.start - r0, sl.stop - r0) for name, sl in self.routes.items()
                             if sl.stop > sl.start]

    def _group_min(self, s: np.ndarray, sl: slice) -> np.ndarray:
        if sl.stop > sl.start:
            return s[:, sl].min(axis=1)
        return np.full(N_RAYS, RAY_MAX)

    def rays(self, x: float, y: float, heading: float, vehicle_segs: np.ndarray) -> np.ndarray:
        dx, dy = ray_dirs(heading)
        s = hit_distances(x, y, dx, dy, self.static, self.edges)
        # nearest routes by point distance to their arrows
        pd = point_segment_distance(x, y, self.route_segs).tolist()
        ranked = sorted((min(pd[a:b]), name) for name, a, b in self.route_slices)
        out = np.full((6, N_RAYS), RAY_MAX)
        out[0] = self._group_min(s, self.walls)
        if ranked:
            out[1] = self._group_min(s, self.routes[ranked[0][1]])
        if len(ranked) > 1:
            out[2] = self._group_min(s, self.routes[ranked[1][1]])
        if len(vehicle_segs):
            out[3] = hit_distances(x, y, dx, dy, vehicle_segs).min(axis=1)
        out[4] = self._group_min(s, self.straight)
        out[5] = self._group_min(s, self.inter)
        return out


def build_observation(rays: np.ndarray, history: list[tuple[float, float, float]]) -> np.ndarray:
    """Flatten (6, 32) ray distances and the last three ``(v, a, phi)`` entries, newest first."""
    hist = [history[-1 - i] for i in range(HISTORY)]
    return np.concatenate([rays.reshape(-1), np.asarray(hist, dtype=np.float64).reshape(-1)])
