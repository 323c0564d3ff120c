import math

import pytest
from hypothesis import given, settings, strategies as st

from divdrive.sim.dynamics import (A_MAX, ACTION_TABLE, PHI_MAX, V_MAX, Action, VehicleState, apply_action,
                                   step_dynamics)


def test_straight_line_motion():
    s = VehicleState(0.0, 0.0, 0.0, 1.0)
    for _ in range(10):
        s = step_dynamics(s, 0.0, 0.0)
    assert abs(s.x - 1.0) <= 1e-12 and s.y == 0.0 and s.theta == 0.0 and s.v == 1.0


def test_heading_direction_in_screen_frame():
    s = step_dynamics(VehicleState(0.0, 0.0, math.pi / 2, 2.0), 0.0, 0.0)
    assert abs(s.x) <= 1e-12 and abs(s.y - 0.2) <= 1e-12


def test_velocity_clamped_at_two():
    s = VehicleState(0.0, 0.0, 0.0, 1.95)
    s = step_dynamics(s, 0.0, 1.0)
    assert s.v == V_MAX
    s = step_dynamics(VehicleState(0, 0, 0, 0.05), 0.0, -1.0)
    assert s.v == 0.0


def test_slip_angle_value():
    # beta = atan(l_r / (l_f + l_r) * tan(phi)) with equal axle distances
    s = step_dynamics(VehicleState(0.0, 0.0, 0.0, 1.0), 0.4, 0.0)
    beta = math.atan(math.tan(0.4) / 2)
    assert abs(beta - 0.2083294381) < 1e-9
    assert abs(s.x - 0.1 * math.cos(beta)) <= 1e-12
    assert abs(s.y - 0.1 * math.sin(beta)) <= 1e-12
    assert abs(s.theta - (1.0 / 2.25) * math.sin(beta) * 0.1) <= 1e-12


def test_positive_steering_turns_right():
    s = VehicleState(0.0, 0.0, -math.pi / 2, 1.0)  # facing north on screen
    for _ in range(20):
        s = step_dynamics(s, 0.3, 0.0)
    assert s.x > 0  # drifted east


@pytest.mark.parametrize("action,dphi,da", [
    (Action.FORWARD, 0.0, 0.25), (Action.BACKWARD, 0.0, -0.25), (Action.RIGHT, 0.0628, 0.0),
    (Action.LEFT, -0.0628, 0.0), (Action.HOLDING, 0.0, 0.0), (Action.RIGHT_FORWARD, 0.0628, 0.25),
    (Action.LEFT_FORWARD, -0.0628, 0.25), (Action.RIGHT_BACKWARD, 0.0628, -0.25),
    (Action.LEFT_BACKWARD, -0.0628, -0.25),
])
def test_action_increments(action, dphi, da):
    phi, a = apply_action(VehicleState(0, 0, 0, 1.0, 0.1, 0.2), action)
    assert abs(phi - (0.1 + dphi)) <= 1e-12
    assert abs(a - (0.2 + da)) <= 1e-12


def test_action_clamps_and_unknown():
    assert apply_action(VehicleState(0, 0, 0, 0, PHI_MAX, A_MAX), Action.RIGHT_FORWARD) == (PHI_MAX, A_MAX)
    with pytest.raises(ValueError):
        apply_action(VehicleState(0, 0, 0, 0), 9)
    assert len(ACTION_TABLE) == 9


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=1, max_size=60), st.floats(0, 2))
def test_bounds_hold_under_any_action_sequence(actions, v0):
    s = VehicleState(0.0, 0.0, 0.0, v0)
    for act in actions:
        phi, a = apply_action(s, act)
        s = step_dynamics(s, phi, a)
        assert 0.0 <= s.v <= V_MAX
        assert -PHI_MAX <= s.phi <= PHI_MAX and -A_MAX <= s.a <= A_MAX
