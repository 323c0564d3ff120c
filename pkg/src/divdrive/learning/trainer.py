"""Q-learning sessions with epsilon-greedy exploration, periodic snapshots and the peer-KL bonus.

Sessions advance in lockstep chunks of ``publish_every`` steps. At the end
of each chunk every session publishes a frozen copy of its online
parameters to a shared registry; during the next chunk each session reads
the latest copies of its peers. Running all sessions in one process this
way keeps results bit-for-bit reproducible.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..sim.dynamics import N_ACTIONS, apply_action
from ..sim.reward import RewardWeights
from ..sim.sensors import OBS_DIM
from ..sim.world import EGO_BINDING, TRAIN, Scenario, World
from .qnet import (Adam, clip_by_global_norm, double_q_targets, forward, init_params,
                   td_loss_and_grad)
from .snapshot import PolicySnapshot, dde_bonus

log = logging.getLogger(__name__)


class TrainingAborted(RuntimeError):
    pass


def linear_schedule(t: float, start: float, end: float, steps: float) -> float:
    """Linear ramp from ``start`` at 0 to ``end`` at ``steps``, constant afterwards."""
    if t >= steps:
        return end
    return start + (end - start) * (t / steps)


@dataclass
class TrainerConfig:
    total_steps: int = 200_000
    snapshot_interval: int = 20_000
    gamma: float = 0.99
    lr: float = 1e-3
    eps_start: float = 1.0
    eps_end: float = 0.1
    eps_steps: int = 100_000
    wcol_start: float = 0.0
    wcol_end: float = 300.0
    wcol_steps: int = 300_000
    alpha: float = 0.01
    publish_every: int = 1_000
    temperature: float = 1.0
    replay_size: int = 100_000
    batch_size: int = 32
    learn_start: int = 1_000
    train_every: int = 1
    target_sync: int = 1_000
    reward_scale: float = 0.01
    huber_delta: float = 1.0
    grad_clip: float = 10.0
    double_q: bool = True
    hidden: tuple = (64, 64)
    multi_agent: bool = False
    seed: int = 0

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        for name in ("eps_steps", "wcol_steps", "snapshot_interval", "publish_every",
                     "target_sync", "batch_size", "replay_size", "train_every"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    @property
    def layers(self) -> tuple[int, ...]:
        return (OBS_DIM, *self.hidden, N_ACTIONS)

    def epsilon(self, t: float) -> float:
        return linear_schedule(t, self.eps_start, self.eps_end, self.eps_steps)

    def w_collision(self, t: float) -> float:
        return linear_schedule(t, self.wcol_start, self.wcol_end, self.wcol_steps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainerConfig":
        return cls(**d)


class ReplayBuffer:
    """Uniform replay over a fixed-size ring; observations stored as float32."""

    def __init__(self, capacity: int, obs_dim: int = OBS_DIM):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.next_obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity)
        self.size = 0
        self.pos = 0

    def add(self, obs, action, reward, next_obs, done) -> None:
        i = self.pos
        self.obs[i] = obs
        self.next_obs[i] = next_obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.dones[i] = float(done)
        self.pos = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, n: int):
        idx = rng.integers(0, self.size, size=n)
        return (self.obs[idx].astype(np.float64), self.actions[idx], self.rewards[idx],
                self.next_obs[idx].astype(np.float64), self.dones[idx])


class _LiveGreedy:
    """Greedy actor that always reads the session's current parameters."""

    def __init__(self, session: "Session"):
        self.session = session

    def act(self, obs) -> int:
        return int(np.argmax(forward(self.session.params, obs)))


@dataclass
class StepLog:
    session: int
    step: int
    r_env: float
    r_total: float


@dataclass
class Session:
    sid: int
    config: TrainerConfig
    scenario: Scenario
    rng: np.random.Generator = field(repr=False)

    def __post_init__(self):
        cfg = self.config
        self.params = init_params(self.rng, cfg.layers)
        self.target = [p.copy() for p in self.params]
        self.opt = Adam(lr=cfg.lr)
        self.replay = ReplayBuffer(cfg.replay_size)
        self.world = World(self.scenario, ego_policy=_LiveGreedy(self))
        self.learners = [i for i, v in enumerate(self.scenario.vehicles) if v.policy == EGO_BINDING]
        if not self.learners:
            raise ValueError("training scenario has no ego-bound vehicle")
        self.episode = 0
        self.t = 0
        self.aborted: Optional[str] = None
        self.snapshots: list[PolicySnapshot] = []
        self.episode_outcomes: list[str] = []
        self._new_episode()

    def _new_episode(self) -> None:
        self.world.reset(self.rng)
        if self.config.multi_agent:
            self.focus = self.learners[self.episode % len(self.learners)]
        else:
            self.focus = self.scenario.ego
        self.obs = self.world.observe(self.focus)

    def run(self, n_steps: int, peers: list, on_step: Optional[Callable[[StepLog], None]] = None) -> None:
        cfg = self.config
        for _ in range(n_steps):
            if self.aborted or self.t >= cfg.total_steps:
                return
            self._one_step(peers, on_step)

    def _one_step(self, peers, on_step) -> None:
        cfg = self.config
        t = self.t
        obs = self.obs
        if self.rng.random() < cfg.epsilon(t):
            action = int(self.rng.integers(N_ACTIONS))
        else:
            action = int(np.argmax(forward(self.params, obs)))
        state = self.world.states[self.focus]
        weights = replace(self.scenario.weights, collision=cfg.w_collision(t))
        res = self.world.step({self.focus: apply_action(state, action, self.world.dt)},
                              focus=self.focus, weights=weights)
        r_env = cfg.reward_scale * res.reward.total
        r_total = r_env + dde_bonus(self.params, peers, obs, cfg.alpha, cfg.temperature)
        terminal = res.outcome in ("GOAL", "COLLISION")
        next_obs = self.world.observe(self.focus)
        self.replay.add(obs, action, r_total, next_obs, terminal)
        self.obs = next_obs
        self.t = t + 1
        if on_step is not None:
            on_step(StepLog(self.sid, self.t, r_env, r_total))
        if res.done:
            self.episode_outcomes.append(res.outcome)
            self.episode += 1
            self._new_episode()
        if self.t >= cfg.learn_start and self.t % cfg.train_every == 0:
            self._learn()
        if self.t % cfg.target_sync == 0:
            self.target = [p.copy() for p in self.params]
        if self.t % cfg.snapshot_interval == 0:
            self.snapshots.append(PolicySnapshot(self.params, self.sid, self.t))

    def _learn(self) -> None:
        cfg = self.config
        o, a, r, o2, d = self.replay.sample(self.rng, cfg.batch_size)
        if cfg.double_q:
            y = double_q_targets(self.params, self.target, r, o2, d, cfg.gamma)
        else:
            y = r + cfg.gamma * (1.0 - d) * forward(self.target, o2).max(axis=1)
        loss, grads = td_loss_and_grad(self.params, o, a, y, cfg.huber_delta)
        if not math.isfinite(loss):
            self.aborted = f"non-finite TD loss at step {self.t}"
            log.error("session %d aborted: %s", self.sid, self.aborted)
            return
        self.opt.step(self.params, clip_by_global_norm(grads, cfg.grad_clip))


@dataclass
class TrainResult:
    snapshots: list[PolicySnapshot]
    aborted: dict[int, str]
    outcomes: dict[int, list[str]]
    steps: dict[int, int]


def train_sessions(config: TrainerConfig, scenario: Scenario, sessions: int, dde: bool = False,
                   on_step: Optional[Callable[[StepLog], None]] = None,
                   progress: Optional[Callable[[int], None]] = None) -> TrainResult:
    """Train ``sessions`` independent learners; returns every snapshot in (step, session) order."""
    if sessions < 1:
        raise ValueError("sessions must be at least 1")
    if dde and sessions < 2:
        raise ValueError("the peer bonus needs at least two sessions")
    scenario = scenario.with_mode(TRAIN)
    seeds = np.random.SeedSequence(config.seed).spawn(sessions)
    runs = [Session(i, config, scenario, np.random.default_rng(s)) for i, s in enumerate(seeds)]
    registry = {s.sid: tuple(p.copy() for p in s.params) for s in runs}
    done = 0
    while done < config.total_steps:
        chunk = min(config.publish_every, config.total_steps - done)
        for s in runs:
            peers = [registry[o.sid] for o in runs if o.sid != s.sid] if dde else []
            s.run(chunk, peers, on_step)
        # publication happens only between chunks, so readers never see a half-written set
        registry = {s.sid: tuple(p.copy() for p in s.params) for s in runs}
        done += chunk
        if progress is not None:
            progress(done)
        if all(s.aborted for s in runs):
            break
    snaps = sorted((p for s in runs for p in s.snapshots), key=lambda p: (p.step, p.session_id))
    return TrainResult(
        snapshots=snaps,
        aborted={s.sid: s.aborted for s in runs if s.aborted},
        outcomes={s.sid: s.episode_outcomes for s in runs},
        steps={s.sid: s.t for s in runs},
    )
