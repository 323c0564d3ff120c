import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divdrive.trajectory import (InvalidTrajectory, LogEntry, Trajectory, TrajectoryLog, distance_matrix,
                                 format_log, parse_log, trajectory_distance)
from oracles import naive_traj_distance

coords = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
paths = st.lists(st.tuples(coords, coords), min_size=1, max_size=30)


def T(pts):
    return Trajectory(np.array(pts, dtype=float))


def test_parallel_offset():
    a = T([[i, 0.0] for i in range(10)])
    b = T([[i, 3.0] for i in range(10)])
    assert trajectory_distance(a, b) == 3.0


def test_unequal_lengths_use_common_prefix():
    a = T([[0, 0], [1, 0], [2, 0], [50, 50], [90, 90]])
    b = T([[0, 1], [1, 1], [2, 1]])
    assert trajectory_distance(a, b) == 1.0


def test_single_points():
    assert math.isclose(trajectory_distance(T([[0, 0]]), T([[1, 1]])), math.sqrt(2), rel_tol=1e-12)


def test_timestep_mismatch_rejected():
    with pytest.raises(InvalidTrajectory):
        trajectory_distance(Trajectory(np.zeros((2, 2)), 0.1), Trajectory(np.zeros((2, 2)), 0.2))


@pytest.mark.parametrize("bad", [np.zeros((0, 2)), np.array([[0.0, np.nan]]), np.array([[np.inf, 0.0]])])
def test_invalid_points(bad):
    with pytest.raises(InvalidTrajectory):
        Trajectory(bad)


@settings(max_examples=60, deadline=None)
@given(paths, paths)
def test_matches_loop_oracle_and_symmetry(p, q):
    a, b = T(p), T(q)
    d = trajectory_distance(a, b)
    assert math.isclose(d, naive_traj_distance(p, q), rel_tol=1e-9, abs_tol=1e-9)
    assert d == trajectory_distance(b, a)
    assert trajectory_distance(a, a) == 0.0


@settings(max_examples=40, deadline=None)
@given(paths, coords, coords)
def test_translation_invariance(p, dx, dy):
    a = T(p)
    b = T([[x + 1.0, y - 2.0] for x, y in p])
    assert math.isclose(trajectory_distance(a.translated(dx, dy), b.translated(dx, dy)),
                        trajectory_distance(a, b), rel_tol=1e-9, abs_tol=1e-9)


@settings(max_examples=40, deadline=None)
@given(paths, paths, st.floats(0.01, 10))
def test_scaling(p, q, c):
    a, b = T(p), T(q)
    assert math.isclose(trajectory_distance(a.scaled(c), b.scaled(c)), c * trajectory_distance(a, b),
                        rel_tol=1e-9, abs_tol=1e-9)


def test_distance_matrix_shape():
    xs = [T([[0, 0], [1, 0]]), T([[0, 2], [1, 2]])]
    m = distance_matrix(xs, xs[:1])
    assert m.shape == (2, 1)
    assert m[1, 0] == 2.0


def test_log_roundtrip_exact():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(7, 2)) * 1e3
    tr = Trajectory(pts, speed=rng.random(7), heading=rng.normal(size=7),
                    steering=rng.normal(size=7), accel=rng.normal(size=7))
    log = TrajectoryLog([LogEntry("sc-1", "p1", tr, "GOAL", 6)], {"config_hash": "abc"})
    text = format_log(log)
    back = parse_log(text)
    assert back.header == {"config_hash": "abc"}
    e = back.entries[0]
    assert e.outcome == "GOAL" and e.steps == 6
    assert np.array_equal(e.trajectory.points, pts)
    assert np.array_equal(e.trajectory.speed, tr.speed)
    assert format_log(back) == text


def test_log_rejects_bad_lines():
    with pytest.raises(ValueError):
        parse_log("a,b,0,1.0\n")
    with pytest.raises(ValueError):
        parse_log("a,b,1,0,0,0,0,0,0\n")
    with pytest.raises(ValueError):
        parse_log("a,b,0,0,0,0,0,0,0\na,b,CRASH,1\n")
