"""Zone maps: walls, navigation routes made of target arrows, reward zones, goals.

Map files are JSON::

    {
      "name": "right_turn",
      "walls": [[x1, y1, x2, y2], ...],
      "routes": {"ego": [[x1, y1, x2, y2], ...], ...},        # target arrows, in order
      "zones": [{"route": "ego", "arrow": 0, "type": "STRAIGHT",
                 "center": [x, y], "length": l, "width": w, "angle": a}, ...],
      "goals": {"ego": {"bounds": [xmin, ymin, xmax, ymax]}, ...}
    }

Units are meters and radians; rectangles accept either ``bounds`` or
``center``/``length``/``width``/``angle``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Rect

STRAIGHT = "STRAIGHT"
INTERSECTION = "INTERSECTION"


@dataclass(frozen=True)
class Zone:
    route: str
    arrow: int
    kind: str
    rect: Rect


@dataclass
class ZoneMap:
    name: str
    walls: np.ndarray
    routes: dict[str, np.ndarray]
    zones: list[Zone]
    goals: dict[str, Rect] = field(default_factory=dict)

    def __post_init__(self):
        self.walls = np.asarray(self.walls, dtype=np.float64).reshape(-1, 4)
        self.routes = {k: np.asarray(v, dtype=np.float64).reshape(-1, 4) for k, v in self.routes.items()}
        for z in self.zones:
            if z.kind not in (STRAIGHT, INTERSECTION):
                raise ValueError(f"zone type must be STRAIGHT or INTERSECTION, got {z.kind!r}")
            if z.route not in self.routes:
                raise ValueError(f"zone references unknown route {z.route!r}")
            if not 0 <= z.arrow < len(self.routes[z.route]):
                raise ValueError(f"zone references missing arrow {z.arrow} of route {z.route!r}")
        for r in self.goals:
            if r not in self.routes:
                raise ValueError(f"goal references unknown route {r!r}")
        self._zone_segs = {}
        for r in self.routes:
            for kind in (STRAIGHT, INTERSECTION):
                rects = [z.rect.segments() for z in self.zones if z.route == r and z.kind == kind]
                self._zone_segs[(r, kind)] = np.vstack(rects) if rects else np.zeros((0, 4))

    def zone_segments(self, route: str, kind: str) -> np.ndarray:
        return self._zone_segs[(route, kind)]

    def zone_at(self, route: str, x: float, y: float):
        """Zone of ``route`` containing the point; intersection zones take precedence."""
        hit = None
        for z in self.zones:
            if z.route != route or not z.rect.contains(x, y):
                continue
            if z.kind == INTERSECTION:
                return z
            if hit is None:
                hit = z
        return hit

    def arrow(self, route: str, idx: int) -> np.ndarray:
        return self.routes[route][idx]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "walls": self.walls.tolist(),
            "routes": {k: v.tolist() for k, v in self.routes.items()},
            "zones": [dict(route=z.route, arrow=z.arrow, type=z.kind, **z.rect.to_dict())
                      for z in self.zones],
            "goals": {k: g.to_dict() for k, g in self.goals.items()},
        }

    @classmethod
    def from_dict(cls, d) -> "ZoneMap":
        zones = [Zone(z["route"], int(z["arrow"]), z["type"], Rect.from_dict(z)) for z in d.get("zones", [])]
        goals = {k: Rect.from_dict(g) for k, g in d.get("goals", {}).items()}
        return cls(d.get("name", "map"), d.get("walls", []), d.get("routes", {}), zones, goals)


def load_map(path: str | Path) -> ZoneMap:
    return ZoneMap.from_dict(json.loads(Path(path).read_text()))


def save_map(path: str | Path, zmap: ZoneMap) -> None:
    Path(path).write_text(json.dumps(zmap.to_dict(), indent=1) + "\n")


def right_turn_map(lane: float = 4.0, arm: float = 50.0, goal_x: tuple[float, float] = (8.0, 12.0)) -> ZoneMap:
    """Four-way intersection of two-lane roads under left-hand traffic.

    Screen coordinates (+y is south). The ego approaches from the south in
    the west lane, turns right across the southbound lane and leaves east in
    the north lane. Oncoming traffic runs south in the east lane.
    """
    h = lane  # half road width: one lane each way
    a = arm
    walls = []
    for sx in (-1, 1):
        for sy in (-1, 1):
            walls.append([sx * h, sy * h, sx * h, sy * a])
            walls.append([sx * h, sy * h, sx * a, sy * h])
    walls += [[-h, a, h, a], [-h, -a, h, -a], [a, -h, a, h], [-a, -h, -a, h]]
    c = lane / 2
    routes = {
        "ego": [[-c, a - 2, -c, h], [-c, h, h, -c], [h, -c, a - 2, -c]],
        "oncoming": [[c, -a + 2, c, -h], [c, -h, c, h], [c, h, c, a - 2]],
    }
    zones = [
        Zone("ego", 0, STRAIGHT, Rect.from_bounds(-h, h, 0.0, a)),
        Zone("ego", 1, INTERSECTION, Rect.from_bounds(-h, -h, h, h)),
        Zone("ego", 2, STRAIGHT, Rect.from_bounds(h, -h, a, 0.0)),
        Zone("oncoming", 0, STRAIGHT, Rect.from_bounds(0.0, -a, h, -h)),
        Zone("oncoming", 1, INTERSECTION, Rect.from_bounds(-h, -h, h, h)),
        Zone("oncoming", 2, STRAIGHT, Rect.from_bounds(0.0, h, h, a)),
    ]
    goals = {
        "ego": Rect.from_bounds(goal_x[0], -h, goal_x[1], 0.0),
        "oncoming": Rect.from_bounds(0.0, a - 8, h, a - 4),
    }
    return ZoneMap("right_turn", walls, routes, zones, goals)


def straight_lane_map(width: float = 7.0, length: float = 40.0, goal: tuple[float, float] = (24.0, 28.0)) -> ZoneMap:
    """Single walled corridor along +x; the toy task for learning smoke tests."""
    h = width / 2
    walls = [[0.0, -h, length, -h], [0.0, h, length, h], [0.0, -h, 0.0, h], [length, -h, length, h]]
    routes = {"ego": [[1.0, 0.0, length - 1.0, 0.0]]}
    zones = [Zone("ego", 0, STRAIGHT, Rect.from_bounds(0.0, -h, length, h))]
    goals = {"ego": Rect.from_bounds(goal[0], -h, goal[1], h)}
    return ZoneMap("straight_lane", walls, routes, zones, goals)


def route_heading(arrow: np.ndarray) -> float:
    return math.atan2(arrow[3] - arrow[1], arrow[2] - arrow[0])
