"""Scenarios, the multi-vehicle world, and episode rollouts."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Protocol, Sequence

import numpy as np

from ..trajectory import Trajectory
from . import dynamics as dyn
from .dynamics import VehicleState, apply_action, clamp, step_dynamics
from .geometry import corners_to_segments, rect_corners, rect_hits_segments, rects_overlap, wrap_angle
from .maps import INTERSECTION, STRAIGHT, ZoneMap, load_map, right_turn_map, straight_lane_map
from .reward import RewardTerms, RewardWeights, compute_reward
from .sensors import OBS_DIM, RaySensor, build_observation

EVAL = "EVAL"
TRAIN = "TRAIN"
EGO_BINDING = "ego"
MAX_TRAIN_COLLISIONS = 150

_HALF_LEN = dyn.VEHICLE_LENGTH / 2
_HALF_WID = dyn.VEHICLE_WIDTH / 2


class ConfigError(ValueError):
    """Invalid scenario, map, or policy binding."""


class DiscretePolicy(Protocol):
    def act(self, obs: np.ndarray) -> int: ...


# ---------------------------------------------------------------------------
# Scenario description
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VehicleSpec:
    name: str
    route: str
    pose: tuple[float, float, float]
    speed: float = 0.0
    perturb: tuple[float, float] = (0.0, 0.0)
    policy: Any = EGO_BINDING
    blind_to: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"name": self.name, "route": self.route, "pose": list(self.pose), "speed": self.speed,
                "perturb": list(self.perturb), "policy": self.policy, "blind_to": list(self.blind_to)}

    @classmethod
    def from_dict(cls, d) -> "VehicleSpec":
        try:
            return cls(d["name"], d["route"], tuple(float(v) for v in d["pose"]), float(d.get("speed", 0.0)),
                       tuple(float(v) for v in d.get("perturb", (0.0, 0.0))), d.get("policy", EGO_BINDING),
                       tuple(d.get("blind_to", ())))
        except KeyError as e:
            raise ConfigError(f"vehicle entry missing field {e}") from None


@dataclass(frozen=True)
class Scenario:
    id: str
    zmap: ZoneMap = field(compare=False, repr=False)
    vehicles: tuple[VehicleSpec, ...]
    seed: int = 0
    time_limit: float = 25.0
    mode: str = EVAL
    ego: int = 0
    weights: RewardWeights = RewardWeights()
    core: Optional[tuple[tuple[float, float], ...]] = None
    map_ref: str = ""
    dt: float = dyn.DT

    def __post_init__(self):
        if self.mode not in (EVAL, TRAIN):
            raise ConfigError(f"mode must be EVAL or TRAIN, got {self.mode!r}")
        if not 0 <= self.ego < len(self.vehicles):
            raise ConfigError("ego index out of range")
        names = [v.name for v in self.vehicles]
        if len(set(names)) != len(names):
            raise ConfigError("vehicle names must be unique")
        for v in self.vehicles:
            if v.route not in self.zmap.routes:
                raise ConfigError(f"vehicle {v.name!r} uses unknown route {v.route!r}")
            for other in v.blind_to:
                if other not in names:
                    raise ConfigError(f"vehicle {v.name!r} masks unknown vehicle {other!r}")
        if self.mode == EVAL and self.vehicles[self.ego].route not in self.zmap.goals:
            raise ConfigError("EVAL scenarios need a goal area for the ego route")

    @property
    def max_steps(self) -> int:
        return int(round(self.time_limit / self.dt))

    @property
    def key(self) -> str:
        return f"{self.id}-{self.seed}"

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=int(seed))

    def with_mode(self, mode: str) -> "Scenario":
        return replace(self, mode=mode)

    def suite(self, count: int, base_seed: Optional[int] = None) -> list["Scenario"]:
        """Fixed-seed evaluation scenarios ``seed, seed+1, ...``."""
        base = self.seed if base_seed is None else base_seed
        return [replace(self, seed=base + i, mode=EVAL) for i in range(count)]

    def initial_states(self, rng: Optional[np.random.Generator] = None) -> list[VehicleState]:
        """Poses shifted along their heading by a uniform draw from ``perturb``."""
        if rng is None:
            rng = np.random.default_rng(self.seed)
        out = []
        for v in self.vehicles:
            off = float(rng.uniform(v.perturb[0], v.perturb[1]))
            x, y, th = v.pose
            out.append(VehicleState(x + off * math.cos(th), y + off * math.sin(th), th, v.speed))
        return out

    def to_dict(self) -> dict:
        d = {
            "id": self.id, "map": self.map_ref or self.zmap.to_dict(), "seed": self.seed,
            "time_limit": self.time_limit, "mode": self.mode, "ego": self.ego,
            "weights": vars(self.weights).copy(),
            "vehicles": [v.to_dict() for v in self.vehicles],
        }
        if self.core is not None:
            d["core"] = [list(p) for p in self.core]
        return d


def _builtin_path(name: str) -> Path:
    return Path(str(resources.files("divdrive") / "data" / name))


def resolve_map(ref, base: Optional[Path] = None) -> tuple[ZoneMap, str]:
    if isinstance(ref, dict):
        return ZoneMap.from_dict(ref), ""
    ref = str(ref)
    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        builders = {"right_turn": right_turn_map, "straight_lane": straight_lane_map}
        if name in builders:
            return builders[name](), ref
        path = _builtin_path(name)
    else:
        path = Path(ref)
        if base is not None and not path.is_absolute():
            path = base / path
    if not path.exists():
        raise ConfigError(f"map file not found: {path}")
    # keep a reference that still resolves after the scenario is saved elsewhere
    if path.resolve().parent == _builtin_path("").resolve():
        ref = f"builtin:{path.name}"
    elif not ref.startswith("builtin:"):
        ref = str(path.resolve())
    return load_map(path), ref


def scenario_from_dict(d: dict, base: Optional[Path] = None) -> Scenario:
    try:
        zmap, ref = resolve_map(d["map"], base)
        w = d.get("weights", {})
        return Scenario(
            id=str(d["id"]), zmap=zmap, vehicles=tuple(VehicleSpec.from_dict(v) for v in d["vehicles"]),
            seed=int(d.get("seed", 0)), time_limit=float(d.get("time_limit", 25.0)),
            mode=d.get("mode", EVAL), ego=int(d.get("ego", 0)), weights=RewardWeights(**w),
            core=tuple(tuple(map(float, p)) for p in d["core"]) if d.get("core") else None,
            map_ref=ref,
        )
    except KeyError as e:
        raise ConfigError(f"scenario missing field {e}") from None


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    if str(path).startswith("builtin:"):
        path = _builtin_path(str(path).split(":", 1)[1])
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    return scenario_from_dict(json.loads(path.read_text()), path.parent)


def save_scenario(path: str | Path, scenario: Scenario) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=1) + "\n")


# ---------------------------------------------------------------------------
# Controllers for non-learning vehicles
# ---------------------------------------------------------------------------


class RoutePath:
    """Arc-length parameterized polyline through a route's target arrows."""

    def __init__(self, arrows: np.ndarray):
        pts = [arrows[0, 0:2]]
        for a in arrows:
            if np.hypot(*(a[0:2] - pts[-1])) > 1e-9:
                pts.append(a[0:2])
            pts.append(a[2:4])
        self.points = np.array(pts)
        seg = np.diff(self.points, axis=0)
        self.seglen = np.hypot(seg[:, 0], seg[:, 1])
        self.cum = np.concatenate([[0.0], np.cumsum(self.seglen)])
        self.length = float(self.cum[-1])
        self._pts = [tuple(map(float, p)) for p in self.points]
        self._cum = self.cum.tolist()
        self._len = self.seglen.tolist()

    def project(self, x: float, y: float) -> float:
        best, best_s = math.inf, 0.0
        pts = self._pts
        for i in range(len(pts) - 1):
            (ax, ay), (bx, by) = pts[i], pts[i + 1]
            dx, dy = bx - ax, by - ay
            l2 = max(dx * dx + dy * dy, 1e-12)
            t = min(max(((x - ax) * dx + (y - ay) * dy) / l2, 0.0), 1.0)
            d = math.hypot(ax + t * dx - x, ay + t * dy - y)
            if d < best:
                best, best_s = d, self._cum[i] + t * self._len[i]
        return float(best_s)

    def point_at(self, s: float) -> tuple[float, float]:
        s = min(max(s, 0.0), self.length)
        i = min(int(np.searchsorted(self.cum, s, side="right")) - 1, len(self.seglen) - 1)
        t = (s - self.cum[i]) / self.seglen[i] if self.seglen[i] > 0 else 0.0
        p = self.points[i] + t * (self.points[i + 1] - self.points[i])
        return float(p[0]), float(p[1])


@dataclass
class ScriptedFollower:
    """Lane-keeping cruise controller along a route; never reacts to traffic."""

    path: RoutePath
    target_speed: float = 1.6
    lookahead: float = 4.0
    steer_gain: float = 1.0
    speed_gain: float = 1.0
    delay: float = 0.0
    stop_margin: float = 1.0

    def control(self, world: "World", idx: int) -> tuple[float, float]:
        st = world.states[idx]
        s = self.path.project(st.x, st.y)
        tx, ty = self.path.point_at(s + self.lookahead)
        omega = wrap_angle(math.atan2(ty - st.y, tx - st.x) - st.theta)
        phi = clamp(self.steer_gain * omega, -dyn.PHI_MAX, dyn.PHI_MAX)
        remaining = max(self.path.length - self.stop_margin - s, 0.0)
        v_ref = min(self.target_speed, math.sqrt(2 * 0.5 * remaining))
        if world.time < self.delay:
            v_ref = 0.0
        a = clamp(self.speed_gain * (v_ref - st.v), -dyn.A_MAX, dyn.A_MAX)
        return phi, a


@dataclass
class PolicyController:
    """Discrete-action policy acting on ray observations."""

    policy: DiscretePolicy

    def control(self, world: "World", idx: int) -> tuple[float, float]:
        obs = world.observe(idx)
        return apply_action(world.states[idx], int(self.policy.act(obs)), world.dt)


@dataclass
class ReplayController:
    """Non-reactive replay of recorded poses; holds the last pose at the end."""

    poses: np.ndarray  # rows x, y, theta, v

    def control(self, world: "World", idx: int) -> tuple[float, float]:
        return 0.0, 0.0

    def state_at(self, step: int) -> VehicleState:
        row = self.poses[min(step, len(self.poses) - 1)]
        return VehicleState(float(row[0]), float(row[1]), float(row[2]), float(row[3]))


def make_controller(binding, spec: VehicleSpec, zmap: ZoneMap, ego_policy=None):
    if binding == EGO_BINDING:
        if ego_policy is None:
            raise ConfigError(f"vehicle {spec.name!r} is bound to the ego policy but none was given")
        return ego_policy if hasattr(ego_policy, "control") else PolicyController(ego_policy)
    if isinstance(binding, str):
        binding = {"type": binding}
    kind = binding.get("type")
    if kind == "scripted":
        opts = {k: float(v) for k, v in binding.items() if k != "type"}
        return ScriptedFollower(RoutePath(zmap.routes[spec.route]), **opts)
    if kind == "snapshot":
        from ..learning.snapshot import load_snapshot
        return PolicyController(load_snapshot(binding["path"]))
    if kind == "replay":
        return ReplayController(np.asarray(binding["poses"], dtype=np.float64).reshape(-1, 4))
    raise ConfigError(f"unbound or unknown policy binding {binding!r} for vehicle {spec.name!r}")


# ---------------------------------------------------------------------------
# World
# ---------------------------------------------------------------------------


@dataclass
class StepResult:
    reward: RewardTerms
    collided: bool
    goal: bool
    done: bool
    outcome: Optional[str] = None


class World:
    """Mutable simulation state for one scenario instance.

    ``controllers`` maps each vehicle to an object with
    ``control(world, idx) -> (phi, a)``; vehicles bound to the ego policy
    receive ``ego_policy``.
    """

    def __init__(self, scenario: Scenario, ego_policy=None, rng: Optional[np.random.Generator] = None,
                 controllers: Optional[Sequence] = None):
        self.scenario = scenario
        self.zmap = scenario.zmap
        self.dt = scenario.dt
        specs = scenario.vehicles
        if controllers is None:
            controllers = [make_controller(v.policy, v, self.zmap, ego_policy) for v in specs]
        self.controllers = list(controllers)
        self.names = [v.name for v in specs]
        self.routes = [v.route for v in specs]
        self.learning = [v.policy == EGO_BINDING for v in specs]
        self.masks = [np.array([n in v.blind_to or j == i for j, n in enumerate(self.names)])
                      for i, v in enumerate(specs)]
        self._sensors = {}
        for r in set(self.routes):
            self._sensors[r] = RaySensor(self.zmap.walls, self.zmap.routes,
                                         self.zmap.zone_segments(r, STRAIGHT),
                                         self.zmap.zone_segments(r, INTERSECTION))
        walls = self.zmap.walls
        self._wall_box = (np.minimum(walls[:, 0], walls[:, 2]), np.maximum(walls[:, 0], walls[:, 2]),
                          np.minimum(walls[:, 1], walls[:, 3]), np.maximum(walls[:, 1], walls[:, 3]))
        self.reset(rng)

    def reset(self, rng: Optional[np.random.Generator] = None) -> None:
        self.states = self.scenario.initial_states(rng)
        for i, c in enumerate(self.controllers):
            if isinstance(c, ReplayController):
                self.states[i] = c.state_at(0)
        self.history = [[(s.v, s.a, s.phi)] * 3 for s in self.states]
        self.step_count = 0
        self.collisions = [0] * len(self.states)
        self._corners = [self._body(s) for s in self.states]

    @property
    def time(self) -> float:
        return self.step_count * self.dt

    @staticmethod
    def _body(s: VehicleState) -> np.ndarray:
        return rect_corners(s.x, s.y, s.theta, _HALF_LEN, _HALF_WID)

    def observe(self, idx: int) -> np.ndarray:
        st = self.states[idx]
        mask = self.masks[idx]
        others = [corners_to_segments(c) for j, c in enumerate(self._corners) if not mask[j]]
        veh = np.vstack(others) if others else np.zeros((0, 4))
        rays = self._sensors[self.routes[idx]].rays(st.x, st.y, st.theta, veh)
        return build_observation(rays, self.history[idx])

    def collides(self, idx: int, corners: Optional[list[np.ndarray]] = None) -> bool:
        corners = self._corners if corners is None else corners
        body = corners[idx]
        if len(self.zmap.walls):
            # axis-aligned bounding-box broad phase before the exact test
            xs, ys = body[:, 0], body[:, 1]
            x0, x1, y0, y1 = self._wall_box
            near = (x1 >= xs.min()) & (x0 <= xs.max()) & (y1 >= ys.min()) & (y0 <= ys.max())
            if near.any() and rect_hits_segments(body, self.zmap.walls[near]).any():
                return True
        for j, other in enumerate(corners):
            if j != idx and rects_overlap(body, other):
                return True
        return False

    def at_goal(self, idx: int) -> bool:
        goal = self.zmap.goals.get(self.routes[idx])
        return goal is not None and rects_overlap(self._corners[idx], goal.corners())

    def controls(self, override: Optional[dict[int, tuple[float, float]]] = None) -> list[tuple[float, float]]:
        out = []
        for i, c in enumerate(self.controllers):
            if override is not None and i in override:
                out.append(override[i])
            else:
                out.append(c.control(self, i))
        return out

    def advance(self, controls: Sequence[tuple[float, float]], mode: Optional[str] = None) -> list[bool]:
        """Step every vehicle; returns per-vehicle collision flags for learning vehicles."""
        mode = mode or self.scenario.mode
        prev = self.states
        new = []
        for i, (s, (phi, a)) in enumerate(zip(prev, controls)):
            c = self.controllers[i]
            if isinstance(c, ReplayController):
                new.append(c.state_at(self.step_count + 1))
            else:
                new.append(step_dynamics(s, phi, a, self.dt))
            self.history[i].append((s.v, a, phi))
            if len(self.history[i]) > 4:
                del self.history[i][0]
        corners = [self._body(s) for s in new]
        collided = [False] * len(new)
        for i in range(len(new)):
            if self.learning[i] and self.collides(i, corners):
                collided[i] = True
                self.collisions[i] += 1
                if mode == TRAIN:
                    # no penetration resolution: keep the previous pose and speed
                    new[i] = replace(prev[i], phi=new[i].phi, a=new[i].a)
                    corners[i] = self._corners[i]
        self.states = new
        self._corners = corners
        self.step_count += 1
        return collided

    def step(self, override: Optional[dict[int, tuple[float, float]]] = None, focus: Optional[int] = None,
             weights: Optional[RewardWeights] = None) -> StepResult:
        """One full simulation step with reward and termination for vehicle ``focus``."""
        i = self.scenario.ego if focus is None else focus
        prev = self.states[i]
        collided = self.advance(self.controls(override))[i]
        new = self.states[i]
        reward = compute_reward(self.zmap, self.routes[i], prev, new, collided, weights or self.scenario.weights)
        goal = self.at_goal(i)
        timeout = self.step_count >= self.scenario.max_steps
        outcome = None
        if self.scenario.mode == EVAL:
            if collided:
                outcome = "COLLISION"
            elif goal:
                outcome = "GOAL"
            elif timeout:
                outcome = "TIMEOUT"
        else:
            if goal:
                outcome = "GOAL"
            elif self.collisions[i] > MAX_TRAIN_COLLISIONS:
                outcome = "COLLISION"
            elif timeout:
                outcome = "TIMEOUT"
        return StepResult(reward, collided, goal, outcome is not None, outcome)


@dataclass
class EpisodeResult:
    trajectory: Trajectory
    outcome: str
    total_reward: float
    steps: int
    rewards: list[RewardTerms] = field(default_factory=list)


def run_episode(scenario: Scenario, ego_policy, record: bool = True,
                seed_override: Optional[int] = None, max_steps: Optional[int] = None) -> EpisodeResult:
    """Roll out one episode of ``scenario`` with ``ego_policy`` driving every ego-bound vehicle.

    ``ego_policy`` is either a discrete policy (``act(obs) -> action``) or a
    controller (``control(world, idx) -> (phi, a)``).
    """
    if seed_override is not None:
        scenario = scenario.with_seed(seed_override)
    world = World(scenario, ego_policy)
    ego = scenario.ego
    xs = [world.states[ego]]
    total = 0.0
    rewards = []
    limit = scenario.max_steps if max_steps is None else max_steps
    outcome = "TIMEOUT"
    while world.step_count < limit:
        res = world.step()
        xs.append(world.states[ego])
        total += res.reward.total
        if record:
            rewards.append(res.reward)
        if res.done:
            outcome = res.outcome
            break
    traj = Trajectory(
        np.array([[s.x, s.y] for s in xs]), scenario.dt,
        speed=[s.v for s in xs], heading=[s.theta for s in xs],
        steering=[s.phi for s in xs], accel=[s.a for s in xs],
    )
    return EpisodeResult(traj, outcome, total, world.step_count, rewards)


def builtin_scenario(name: str) -> Scenario:
    return load_scenario(_builtin_path(f"{name}_scenario.json"))


__all__ = [
    "Scenario", "VehicleSpec", "World", "run_episode", "EpisodeResult", "ConfigError",
    "ScriptedFollower", "PolicyController", "ReplayController", "RoutePath", "load_scenario",
    "save_scenario", "scenario_from_dict", "builtin_scenario", "EVAL", "TRAIN", "OBS_DIM",
]
