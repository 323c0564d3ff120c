"""Small fully connected action-value network with hand-written backprop and Adam."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..sim.dynamics import A_MAX, N_ACTIONS, PHI_MAX, V_MAX
from ..sim.sensors import HISTORY, N_RAYS, OBS_DIM
from ..sim.geometry import RAY_MAX

LAYERS = (OBS_DIM, 64, 64, N_ACTIONS)


def input_scale() -> np.ndarray:
    """Fixed per-feature scaling that maps observations to roughly [-1, 1]."""
    rays = np.full(6 * N_RAYS, 1.0 / RAY_MAX)
    hist = np.tile([1.0 / V_MAX, 1.0 / A_MAX, 1.0 / PHI_MAX], HISTORY)
    return np.concatenate([rays, hist])


_SCALE = input_scale()


def init_params(rng: np.random.Generator, layers: Sequence[int] = LAYERS) -> list[np.ndarray]:
    params = []
    for fan_in, fan_out in zip(layers[:-1], layers[1:]):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        params.append(rng.uniform(-lim, lim, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def layer_sizes(params: Sequence[np.ndarray]) -> tuple[int, ...]:
    return tuple([params[0].shape[0]] + [w.shape[1] for w in params[0::2]])


def forward(params: Sequence[np.ndarray], obs: np.ndarray) -> np.ndarray:
    """Action values for a single observation (1-D) or a batch (2-D)."""
    h = obs * _SCALE
    n = len(params) // 2
    for i in range(n):
        h = h @ params[2 * i] + params[2 * i + 1]
        if i < n - 1:
            h = np.tanh(h)
    return h


def forward_cache(params, obs):
    acts = [obs * _SCALE]
    n = len(params) // 2
    h = acts[0]
    for i in range(n):
        h = h @ params[2 * i] + params[2 * i + 1]
        if i < n - 1:
            h = np.tanh(h)
            acts.append(h)
    return h, acts


def huber(x: np.ndarray, delta: float = 1.0):
    ax = np.abs(x)
    loss = np.where(ax <= delta, 0.5 * x * x, delta * (ax - 0.5 * delta))
    grad = np.clip(x, -delta, delta)
    return loss, grad


def td_loss_and_grad(params, obs, actions, targets, delta: float = 1.0):
    """Mean Huber loss of ``Q(obs, action) - target`` and its parameter gradient."""
    q, acts = forward_cache(params, obs)
    b = len(obs)
    idx = np.arange(b)
    err = q[idx, actions] - targets
    loss, g = huber(err, delta)
    dq = np.zeros_like(q)
    dq[idx, actions] = g / b
    grads = [None] * len(params)
    n = len(params) // 2
    d = dq
    for i in reversed(range(n)):
        grads[2 * i] = acts[i].T @ d
        grads[2 * i + 1] = d.sum(axis=0)
        if i > 0:
            d = (d @ params[2 * i].T) * (1.0 - acts[i] ** 2)
    return float(loss.mean()), grads


def double_q_targets(online, target, rewards, next_obs, dones, gamma: float) -> np.ndarray:
    """One-step targets: online network picks the next action, target network scores it."""
    best = np.argmax(forward(online, next_obs), axis=1)
    q_next = forward(target, next_obs)[np.arange(len(best)), best]
    return rewards + gamma * (1.0 - dones) * q_next


@dataclass
class Adam:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1 - self.beta1 ** self.t
        c2 = 1 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def clip_by_global_norm(grads: list[np.ndarray], max_norm: float) -> list[np.ndarray]:
    if max_norm is None or max_norm <= 0:
        return grads
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if norm > max_norm:
        return [g * (max_norm / norm) for g in grads]
    return grads


def softmax(q: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    z = q / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(q: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    z = q / temperature
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def kl_divergence(logp: np.ndarray, logq: np.ndarray) -> np.ndarray:
    """KL(p || q) from log-probabilities along the last axis, floored at zero."""
    return np.maximum(np.sum(np.exp(logp) * (logp - logq), axis=-1), 0.0)


def kl_probs(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) for explicit probability vectors; terms with p = 0 contribute nothing."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    live = p > 0
    if np.any(q[live] <= 0):
        return float("inf")
    return max(float(np.sum(p[live] * (np.log(p[live]) - np.log(q[live])))), 0.0)
