import math

import numpy as np
from hypothesis import given, settings, strategies as st

from divdrive.sim.geometry import (RAY_MAX, Rect, cast_rays, ray_directions, rect_corners,
                                   rect_hits_segments, rects_overlap, wrap_angle)
from divdrive.sim.maps import right_turn_map
from divdrive.sim.sensors import N_RAYS, OBS_DIM, RaySensor, build_observation, ray_channels, ray_dirs


def test_wall_ahead_distance():
    segs = np.array([[10.0, -5.0, 10.0, 5.0]])
    d = cast_rays(0.0, 0.0, ray_directions(4, 0.0), segs)
    assert d[0] == 10.0 and d[1] == RAY_MAX and d[2] == RAY_MAX


def test_cap_at_fifty():
    segs = np.array([[80.0, -5.0, 80.0, 5.0]])
    assert cast_rays(0.0, 0.0, ray_directions(1, 0.0), segs)[0] == RAY_MAX


def test_ray_dirs_start_at_heading():
    dx, dy = ray_dirs(0.3)
    assert math.isclose(dx[0], math.cos(0.3)) and math.isclose(dy[0], math.sin(0.3))
    assert len(dx) == N_RAYS


def test_observation_layout():
    rays = np.arange(6 * N_RAYS, dtype=float).reshape(6, N_RAYS)
    hist = [(9, 9, 9), (1, 2, 3), (4, 5, 6), (7, 8, 9)]
    obs = build_observation(rays, hist)
    assert obs.shape == (OBS_DIM,) == (201,)
    assert list(obs[-9:]) == [7, 8, 9, 4, 5, 6, 1, 2, 3]


def test_sensor_matches_generic_caster():
    zmap = right_turn_map()
    from divdrive.sim.maps import INTERSECTION, STRAIGHT
    zs, zi = zmap.zone_segments("ego", STRAIGHT), zmap.zone_segments("ego", INTERSECTION)
    sensor = RaySensor(zmap.walls, zmap.routes, zs, zi)
    car = Rect(2.0, -10.0, 4.5, 1.8, math.pi / 2).segments()
    x, y, th = -2.0, 8.0, -math.pi / 2
    got = sensor.rays(x, y, th, car)
    exp = ray_channels(x, y, th, [zmap.walls, zmap.routes["ego"], zmap.routes["oncoming"], car, zs, zi])
    assert np.array_equal(got, exp)


def test_rect_overlap():
    a = rect_corners(0, 0, 0, 2.25, 0.9)
    assert rects_overlap(a, rect_corners(4.0, 0, 0, 2.25, 0.9))
    assert not rects_overlap(a, rect_corners(4.6, 0, 0, 2.25, 0.9))
    assert rects_overlap(a, rect_corners(0, 1.5, math.pi / 2, 2.25, 0.9))


def test_rect_hits_segments():
    body = rect_corners(0, 0, 0, 2.25, 0.9)
    segs = np.array([[-5, 0.8, 5, 0.8], [-5, 1.0, 5, 1.0], [0, -5, 0, 5]])
    assert rect_hits_segments(body, segs).tolist() == [True, False, True]


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50))
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)


def test_rect_contains():
    r = Rect.from_bounds(0, 0, 4, 2)
    assert r.contains(1, 1) and not r.contains(5, 1)
