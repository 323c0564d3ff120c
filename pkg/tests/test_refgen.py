import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divdrive.refgen import (BridgeParams, CoreTrajectory, InfeasibleReference, PControlDriver, PControlParams,
                             brownian_bridge, default_core, generate_reference_set, pcontrol_command,
                             pcontrol_convert, perturb_core, read_reference_set, write_reference_set)
from divdrive.sim import dynamics as dyn
from divdrive.sim.world import builtin_scenario, run_episode
from divdrive.trajectory import trajectory_distance

CORE = CoreTrajectory(np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]]))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 300), st.floats(0.1, 30), st.floats(0, 5), st.integers(0, 2**32 - 1))
def test_bridge_endpoints_exact(n, total, sigma, seed):
    b = brownian_bridge(n, total, sigma, seed)
    assert len(b) == n and b[0] == 0.0 and b[-1] == 0.0


def test_bridge_zero_sigma_and_determinism():
    assert not brownian_bridge(50, 5.0, 0.0, 1).any()
    assert np.array_equal(brownian_bridge(50, 5.0, 1.0, 7), brownian_bridge(50, 5.0, 1.0, 7))
    with pytest.raises(ValueError):
        brownian_bridge(1, 1.0, 1.0, 0)


def test_bridge_variance_monte_carlo():
    rng = np.random.default_rng(123)
    n, total, sigma = 21, 4.0, 1.5
    samples = np.array([brownian_bridge(n, total, sigma, rng) for _ in range(10_000)])
    t = np.linspace(0, total, n)
    for i in (5, 10, 15):
        expected = sigma**2 * t[i] * (total - t[i]) / total
        assert abs(samples[:, i].var() / expected - 1) < 0.05


def test_core_validation_and_geometry():
    with pytest.raises(ValueError):
        CoreTrajectory(np.array([[0.0, 0.0]]))
    with pytest.raises(ValueError):
        CoreTrajectory(np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]))
    assert CORE.length == 20.0
    pos, tan, _ = CORE.locate(np.array([5.0, 15.0]))
    assert np.allclose(pos, [[5, 0], [10, 5]]) and np.allclose(tan, [[1, 0], [0, 1]])


@pytest.mark.parametrize("seed", range(5))
def test_perturb_endpoints_match_core(seed):
    tgt = perturb_core(CORE, BridgeParams(sigma_la=0.8, sigma_lo=2.0), seed).target
    assert np.array_equal(tgt.points[0], CORE.points[0]) and np.array_equal(tgt.points[-1], CORE.points[-1])
    assert tgt.timestep == 0.1


def test_perturb_duration_and_distinct_seeds():
    bp = BridgeParams(v_lo=2.0)
    a, b = perturb_core(CORE, bp, 1).target, perturb_core(CORE, bp, 2).target
    assert len(a) == round(20.0 / (2.0 * 0.1)) + 1
    assert trajectory_distance(a, b) > 0


def test_perturb_without_noise_follows_core():
    tgt = perturb_core(CORE, BridgeParams(sigma_la=0.0, sigma_lo=0.0, v_lo=1.0), 0).target
    steps = np.hypot(*np.diff(tgt.points, axis=0).T)
    assert np.allclose(steps, 0.1)


def test_curvature_flag():
    sharp = CoreTrajectory(np.array([[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]]))
    assert perturb_core(sharp, BridgeParams(sigma_la=3.0, v_lo=0.5), 0).curvature_flag
    assert not perturb_core(CORE, BridgeParams(sigma_la=0.0), 0).curvature_flag


def test_pcontrol_examples():
    phi, a = pcontrol_command(0.0, 0.0, 0.0, 1.0, 2.0, 0.0, PControlParams())
    assert phi == 0.0 and a == 1.0
    # unclamped value of the same case
    p = PControlParams()
    assert p.w_a * 2.0 / p.nu - 1.0 * math.sin(0.0) == 3.0
    assert pcontrol_command(3.0, 4.0, 1.0, 0.0, 3.0, 4.0, p) == (0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(*(st.floats(-50, 50) for _ in range(2)), st.floats(-7, 7), st.floats(0, 2), st.floats(-50, 50),
       st.floats(-50, 50))
def test_pcontrol_within_bounds(x, y, th, v, tx, ty):
    phi, a = pcontrol_command(x, y, th, v, tx, ty, PControlParams())
    assert abs(phi) <= dyn.PHI_MAX and abs(a) <= dyn.A_MAX


def test_pcontrol_params_validation():
    with pytest.raises(ValueError):
        PControlParams(nu=0.0)
    with pytest.raises(ValueError):
        BridgeParams(v_lo=0.0)
    with pytest.raises(ValueError):
        BridgeParams(sigma_la=-1.0)


class _Recorder(PControlDriver):
    def __init__(self, *a):
        super().__init__(*a)
        self.states = []

    def control(self, world, idx):
        self.states.append(world.states[idx])
        return super().control(world, idx)


def test_converted_trace_respects_state_bounds():
    sc = builtin_scenario("right_turn")
    tgt = perturb_core(default_core(sc), BridgeParams(sigma_la=0.3, v_lo=2.0), 0).target
    drv = _Recorder(tgt, PControlParams())
    res = run_episode(sc, drv, record=False, max_steps=len(tgt) + 40)
    for s in drv.states:
        assert dyn.V_MIN <= s.v <= dyn.V_MAX and abs(s.phi) <= dyn.PHI_MAX and abs(s.a) <= dyn.A_MAX
    steps = np.hypot(*np.diff(res.trajectory.points, axis=0).T)
    assert steps.max() <= dyn.V_MAX * 0.1 + 1e-9


def test_convert_reports_rejection_without_raising():
    sc = builtin_scenario("right_turn")
    # a target that drives straight into the wall on the far side
    start = np.array(sc.core[0])
    pts = start + np.outer(np.arange(200) * 0.2, [1.0, 0.0])
    from divdrive.trajectory import Trajectory
    conv = pcontrol_convert(Trajectory(pts, 0.1), PControlParams(), sc)
    assert not conv.accepted and conv.outcome != "GOAL"


def test_reference_set_small_and_deterministic(tmp_path):
    sc = builtin_scenario("right_turn")
    bp = BridgeParams(sigma_la=0.3, v_lo=2.0, count=4)
    r1 = generate_reference_set(sc, bp=bp)
    r2 = generate_reference_set(sc, bp=bp)
    assert len(r1.trajectories) == 4 and r1.attempts >= 4
    assert all(a == b for a, b in zip(r1.trajectories, r2.trajectories))
    write_reference_set(tmp_path / "ref.log", r1)
    back, header = read_reference_set(tmp_path / "ref.log")
    assert header["scenario"] == sc.id and int(header["accepted"]) == 4
    assert all(trajectory_distance(a, b) < 1e-6 for a, b in zip(back, r1.trajectories))


def test_infeasible_reference():
    sc = builtin_scenario("right_turn")
    wall = CoreTrajectory(np.array([sc.core[0], (sc.core[0][0] + 60.0, sc.core[0][1])]))
    with pytest.raises(InfeasibleReference):
        generate_reference_set(sc, core=wall, bp=BridgeParams(sigma_la=0.0, sigma_lo=0.0, v_lo=2.0), count=1,
                               cap_factor=2)
    with pytest.raises(ValueError):
        generate_reference_set(sc, count=0)
