"""Kinematic bicycle model and the discrete incremental action set.

Coordinates follow the screen convention (+x east, +y south), so a positive
heading change is a clockwise, i.e. rightward, turn and a positive steering
angle steers right, matching the action table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum

DT = 0.1
VEHICLE_LENGTH = 4.5
VEHICLE_WIDTH = 1.8
L_FRONT = L_REAR = VEHICLE_LENGTH / 2
V_MIN, V_MAX = 0.0, 2.0
PHI_MAX = 0.785
A_MAX = 1.0


class Action(IntEnum):
    FORWARD = 0
    BACKWARD = 1
    RIGHT = 2
    LEFT = 3
    HOLDING = 4
    RIGHT_FORWARD = 5
    LEFT_FORWARD = 6
    RIGHT_BACKWARD = 7
    LEFT_BACKWARD = 8


# (steering rate rad/s, jerk m/s^3) per action
ACTION_TABLE = {
    Action.FORWARD: (0.0, 2.5),
    Action.BACKWARD: (0.0, -2.5),
    Action.RIGHT: (0.628, 0.0),
    Action.LEFT: (-0.628, 0.0),
    Action.HOLDING: (0.0, 0.0),
    Action.RIGHT_FORWARD: (0.628, 2.5),
    Action.LEFT_FORWARD: (-0.628, 2.5),
    Action.RIGHT_BACKWARD: (0.628, -2.5),
    Action.LEFT_BACKWARD: (-0.628, -2.5),
}
N_ACTIONS = len(ACTION_TABLE)


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    theta: float
    v: float
    phi: float = 0.0
    a: float = 0.0


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def step_dynamics(state: VehicleState, phi: float, a: float, dt: float = DT) -> VehicleState:
    """Advance one explicit-Euler step of the center-of-gravity bicycle model.

    Position and heading use the pre-update speed; the new speed is clamped
    to ``[V_MIN, V_MAX]``. The applied control is stored on the new state.
    """
    beta = math.atan(L_REAR / (L_FRONT + L_REAR) * math.tan(phi))
    v = state.v
    ang = state.theta + beta
    return VehicleState(
        x=state.x + v * math.cos(ang) * dt,
        y=state.y + v * math.sin(ang) * dt,
        theta=state.theta + (v / L_REAR) * math.sin(beta) * dt,
        v=clamp(v + a * dt, V_MIN, V_MAX),
        phi=phi,
        a=a,
    )


def apply_action(state: VehicleState, action: int, dt: float = DT) -> tuple[float, float]:
    """Control after applying an incremental action to the last control."""
    try:
        g_phi, g_a = ACTION_TABLE[Action(action)]
    except ValueError:
        raise ValueError(f"unknown action id {action!r}") from None
    return (clamp(g_phi * dt + state.phi, -PHI_MAX, PHI_MAX),
            clamp(g_a * dt + state.a, -A_MAX, A_MAX))


def with_control(state: VehicleState, phi: float, a: float) -> VehicleState:
    return replace(state, phi=phi, a=a)
