"""Reference trajectory sets: a hand-made core path perturbed by Brownian bridges,
then driven by a proportional tracking controller through the simulator.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .sim import dynamics as dyn
from .sim.dynamics import clamp
from .sim.geometry import wrap_angle
from .sim.world import EVAL, Scenario, run_episode
from .trajectory import DT, LogEntry, Trajectory, TrajectoryLog, read_log, write_log


class InfeasibleReference(RuntimeError):
    """No perturbed target could be tracked to the goal within the attempt cap."""


@dataclass(frozen=True)
class CoreTrajectory:
    points: np.ndarray
    duration: Optional[float] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if len(pts) < 2:
            raise ValueError("core trajectory needs at least two points")
        seg = np.hypot(*np.diff(pts, axis=0).T)
        if np.any(seg <= 0):
            raise ValueError("core arc length must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def locate(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Positions, unit tangents and segment indices at arc lengths ``s``."""
        s = np.clip(np.asarray(s, dtype=np.float64), 0.0, self.length)
        i = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(self.points) - 2)
        p0, p1 = self.points[i], self.points[i + 1]
        seg = self._cum[i + 1] - self._cum[i]
        t = ((s - self._cum[i]) / seg)[:, None]
        tangent = (p1 - p0) / seg[:, None]
        return p0 + t * (p1 - p0), tangent, i

    def curvature_radius(self) -> np.ndarray:
        """Per-segment local radius of curvature (inf on straight stretches)."""
        d = np.diff(self.points, axis=0)
        ang = np.arctan2(d[:, 1], d[:, 0])
        turn = np.abs([wrap_angle(b - a) for a, b in zip(ang[:-1], ang[1:])])
        seg = np.hypot(d[:, 0], d[:, 1])
        with np.errstate(divide="ignore"):
            rv = np.where(turn > 1e-9, 0.5 * (seg[:-1] + seg[1:]) / np.maximum(turn, 1e-300), np.inf)
        radius = np.full(len(seg), np.inf)
        radius[:-1] = np.minimum(radius[:-1], rv)
        radius[1:] = np.minimum(radius[1:], rv)
        return radius


@dataclass(frozen=True)
class BridgeParams:
    sigma_la: float = 0.5
    sigma_lo: float = 1.0
    v_lo: float = 1.2
    count: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.sigma_la < 0 or self.sigma_lo < 0:
            raise ValueError("bridge scales must be non-negative")
        if not self.v_lo > 0:
            raise ValueError("v_lo must be positive")


@dataclass(frozen=True)
class PControlParams:
    nu: float = 2.0
    w_phi: float = 1.0
    w_a: float = 3.0

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("lookahead nu must be positive")


def brownian_bridge(n_steps: int, total_time: float, sigma: float,
                    seed: int | np.random.Generator | None = None) -> np.ndarray:
    """``n_steps`` samples of a bridge on ``[0, total_time]`` pinned to zero at both ends."""
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    t = np.linspace(0.0, total_time, n_steps)
    dt = total_time / (n_steps - 1)
    inc = rng.standard_normal(n_steps - 1) * (sigma * math.sqrt(dt))
    w = np.concatenate([[0.0], np.cumsum(inc)])
    b = w - (t / total_time) * w[-1]
    b[0] = 0.0
    b[-1] = 0.0
    return b


@dataclass
class Perturbed:
    target: Trajectory
    curvature_flag: bool


def perturb_core(core: CoreTrajectory, params: BridgeParams,
                 seed: int | np.random.Generator | None = None, dt: float = DT) -> Perturbed:
    """Target trajectory from longitudinal and lateral bridges around the core.

    The duration is the core length over ``v_lo`` rounded to whole steps, so
    the nominal speed is adjusted slightly to land exactly on the end point.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = max(int(round(core.length / (params.v_lo * dt))), 1) + 1
    total = (n - 1) * dt
    t = np.arange(n) * dt
    v_nom = core.length / total
    b_lo = brownian_bridge(n, total, params.sigma_lo, rng)
    b_la = brownian_bridge(n, total, params.sigma_la, rng)
    s = np.maximum.accumulate(np.clip(v_nom * t + b_lo, 0.0, core.length))
    s[-1] = core.length
    pos, tangent, seg = core.locate(s)
    normal = np.stack([-tangent[:, 1], tangent[:, 0]], axis=1)
    pts = pos + b_la[:, None] * normal
    pts[0] = core.points[0]
    pts[-1] = core.points[-1]
    flag = bool(np.any(np.abs(b_la) > core.curvature_radius()[seg]))
    return Perturbed(Trajectory(pts, dt), flag)


def pcontrol_command(x: float, y: float, theta: float, v: float, tx: float, ty: float,
                     params: PControlParams) -> tuple[float, float]:
    """Steering and acceleration toward a target point, clamped to the vehicle bounds."""
    dist = math.hypot(tx - x, ty - y)
    omega = wrap_angle(math.atan2(ty - y, tx - x) - theta) if dist > 0 else 0.0
    phi = params.w_phi * math.sin(omega)
    a = params.w_a * dist / params.nu - v * math.sin(omega)
    return clamp(phi, -dyn.PHI_MAX, dyn.PHI_MAX), clamp(a, -dyn.A_MAX, dyn.A_MAX)


class PControlDriver:
    """Controller chasing ``target`` at ``nu`` seconds ahead of the current time."""

    def __init__(self, target: Trajectory, params: PControlParams):
        self.target = target.points
        self.params = params
        self.ahead = int(round(params.nu / target.timestep))

    def control(self, world, idx: int) -> tuple[float, float]:
        st = world.states[idx]
        k = min(world.step_count + self.ahead, len(self.target) - 1)
        tx, ty = self.target[k]
        return pcontrol_command(st.x, st.y, st.theta, st.v, float(tx), float(ty), self.params)


@dataclass
class Conversion:
    trajectory: Trajectory
    accepted: bool
    outcome: str


def pcontrol_convert(target: Trajectory, params: PControlParams, scenario: Scenario,
                     max_steps: Optional[int] = None) -> Conversion:
    """Drive the ego of ``scenario`` after ``target``; accepted only on reaching the goal cleanly."""
    scenario = scenario.with_mode(EVAL)
    if max_steps is None:
        max_steps = max(scenario.max_steps, len(target) + 2 * int(round(params.nu / target.timestep)))
    res = run_episode(scenario, PControlDriver(target, params), record=False, max_steps=max_steps)
    return Conversion(res.trajectory, res.outcome == "GOAL", res.outcome)


@dataclass
class ReferenceSet:
    trajectories: list[Trajectory]
    attempts: int
    outcomes: dict
    flagged: int
    header: dict


def default_core(scenario: Scenario) -> CoreTrajectory:
    if scenario.core is None:
        raise ValueError(f"scenario {scenario.id!r} defines no core trajectory")
    return CoreTrajectory(np.array(scenario.core))


def generate_reference_set(scenario: Scenario, core: Optional[CoreTrajectory] = None,
                           bp: BridgeParams = BridgeParams(), pp: PControlParams = PControlParams(),
                           count: Optional[int] = None, cap_factor: int = 20) -> ReferenceSet:
    """Accepted P-control traces until ``count`` are collected or ``cap_factor * count`` attempts.

    Attempt ``i`` perturbs with seed ``(bp.seed, i)`` and runs against the
    traffic of ``scenario.with_seed(scenario.seed + i)``.
    """
    count = bp.count if count is None else count
    if count < 1:
        raise ValueError("count must be at least 1")
    core = default_core(scenario) if core is None else core
    accepted: list[Trajectory] = []
    outcomes: dict[str, int] = {}
    flagged = 0
    attempts = 0
    while len(accepted) < count and attempts < cap_factor * count:
        rng = np.random.default_rng([bp.seed, attempts])
        pert = perturb_core(core, bp, rng, scenario.dt)
        conv = pcontrol_convert(pert.target, pp, scenario.with_seed(scenario.seed + attempts))
        attempts += 1
        outcomes[conv.outcome] = outcomes.get(conv.outcome, 0) + 1
        flagged += pert.curvature_flag
        if conv.accepted:
            accepted.append(conv.trajectory)
    if not accepted:
        raise InfeasibleReference(
            f"no accepted reference trace in {attempts} attempts (outcomes: {outcomes})")
    header = {"scenario": scenario.id, "attempts": attempts, "accepted": len(accepted),
              **{f"bridge.{k}": v for k, v in asdict(bp).items()},
              **{f"pcontrol.{k}": v for k, v in asdict(pp).items()}}
    return ReferenceSet(accepted, attempts, outcomes, flagged, header)


def write_reference_set(path: str | Path, refs: ReferenceSet, extra_header: Optional[dict] = None) -> None:
    header = {k: str(v) for k, v in {**refs.header, **(extra_header or {})}.items()}
    entries = [LogEntry(str(refs.header.get("scenario", "ref")), f"ref{i}", tr, "GOAL", len(tr) - 1)
               for i, tr in enumerate(refs.trajectories)]
    write_log(path, TrajectoryLog(entries, header))


def read_reference_set(path: str | Path) -> tuple[list[Trajectory], dict]:
    log = read_log(path)
    return [e.trajectory for e in log.entries], log.header


__all__ = [
    "CoreTrajectory", "default_core", "PControlDriver", "BridgeParams", "PControlParams", "brownian_bridge", "perturb_core",
    "pcontrol_command", "pcontrol_convert", "generate_reference_set", "ReferenceSet",
    "InfeasibleReference", "write_reference_set", "read_reference_set",
]
