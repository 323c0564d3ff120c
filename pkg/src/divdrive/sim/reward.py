"""Movement, collision, angle and center-line reward terms."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import VehicleState
from .geometry import wrap_angle
from .maps import INTERSECTION, STRAIGHT, ZoneMap


@dataclass(frozen=True)
class RewardWeights:
    move: float = 100.0
    collision: float = 300.0
    angle: float = 0.0
    center: float = 0.0


@dataclass(frozen=True)
class RewardTerms:
    move: float
    collision: float
    angle: float
    center: float

    @property
    def total(self) -> float:
        return self.move + self.collision + self.angle + self.center


def move_reward_intersection(w_move: float, chi_prev: float, chi_now: float) -> float:
    return w_move * max(0.0, chi_prev - chi_now)


def move_reward_straight(w_move: float, psi: float) -> float:
    return w_move * psi


def angle_reward(w_angle: float, omega: float) -> float:
    return w_angle * (0.5 - (omega / math.pi) ** 2)


def center_reward(w_center: float, lam: float) -> float:
    return w_center * (5.0 * math.exp(-8.0 * lam * lam) - 0.5)


def compute_reward(zmap: ZoneMap, route: str, prev: VehicleState, new: VehicleState,
                   collided: bool, weights: RewardWeights) -> RewardTerms:
    zone = zmap.zone_at(route, new.x, new.y)
    r_move = r_angle = r_center = 0.0
    if zone is not None:
        arrow = zmap.arrow(route, zone.arrow)
        if zone.kind == INTERSECTION:
            tx, ty = arrow[2], arrow[3]
            chi_prev = math.hypot(prev.x - tx, prev.y - ty)
            chi_now = math.hypot(new.x - tx, new.y - ty)
            r_move = move_reward_intersection(weights.move, chi_prev, chi_now)
        elif zone.kind == STRAIGHT:
            ax, ay = arrow[2] - arrow[0], arrow[3] - arrow[1]
            norm = math.hypot(ax, ay)
            psi = ((new.x - prev.x) * ax + (new.y - prev.y) * ay) / norm
            r_move = move_reward_straight(weights.move, psi)
            if r_move >= 0.0:
                omega = wrap_angle(new.theta - math.atan2(ay, ax))
                t = ((new.x - arrow[0]) * ax + (new.y - arrow[1]) * ay) / (norm * norm)
                t = min(max(t, 0.0), 1.0)
                lam = math.hypot(arrow[0] + t * ax - new.x, arrow[1] + t * ay - new.y)
                r_angle = angle_reward(weights.angle, omega)
                r_center = center_reward(weights.center, lam)
    r_col = -weights.collision if collided else 0.0
    return RewardTerms(r_move, r_col, r_angle, r_center)

