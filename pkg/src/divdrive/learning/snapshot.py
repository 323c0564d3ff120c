"""Frozen policy snapshots, their binary file format, and the diversity bonus.

File layout (all integers little-endian)::

    b"DVSNAP"            magic
    uint16               format version
    uint32               header length in bytes
    <header>             UTF-8 JSON: layers, session_id, step, driving_score, version_tag
    float64[...]         weight and bias arrays in layer order, row-major, little-endian
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..sim.dynamics import N_ACTIONS
from ..sim.sensors import OBS_DIM
from .qnet import forward, kl_divergence, kl_probs, layer_sizes, log_softmax, softmax

MAGIC = b"DVSNAP"
FORMAT_VERSION = 1
T_DIST = 1.0


class SnapshotError(ValueError):
    """Malformed snapshot file or parameters violating the 201-in / 9-out contract."""


def _freeze(params: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
    out = []
    for p in params:
        a = np.array(p, dtype=np.float64, copy=True)
        a.setflags(write=False)
        out.append(a)
    return tuple(out)


def _check_layers(layers: Sequence[int]) -> None:
    if len(layers) < 2 or layers[0] != OBS_DIM or layers[-1] != N_ACTIONS:
        raise SnapshotError(f"layer sizes {tuple(layers)} must start at {OBS_DIM} and end at {N_ACTIONS}")


@dataclass(frozen=True, eq=False)
class PolicySnapshot:
    params: tuple
    session_id: int = 0
    step: int = 0
    driving_score: Optional[float] = None
    version: str = "v1"

    def __post_init__(self):
        object.__setattr__(self, "params", _freeze(self.params))
        if len(self.params) % 2 or not self.params:
            raise SnapshotError("parameters must alternate weight and bias arrays")
        _check_layers(layer_sizes(self.params))

    @property
    def layers(self) -> tuple[int, ...]:
        return layer_sizes(self.params)

    @property
    def policy_id(self) -> str:
        return f"s{self.session_id:02d}-{self.step:08d}"

    def _obs(self, obs) -> np.ndarray:
        obs = np.asarray(obs, dtype=np.float64)
        if obs.shape[-1] != OBS_DIM:
            raise ValueError(f"observation must have {OBS_DIM} entries, got {obs.shape[-1]}")
        return obs

    def q_values(self, obs) -> np.ndarray:
        return forward(self.params, self._obs(obs))

    def act(self, obs) -> int:
        # np.argmax returns the first maximum, so ties go to the lowest action index
        return int(np.argmax(self.q_values(obs)))

    def action_distribution(self, obs, temperature: float = T_DIST) -> np.ndarray:
        return softmax(self.q_values(obs), temperature)

    def with_score(self, score: float) -> "PolicySnapshot":
        return replace(self, driving_score=float(score))

    def digest(self) -> str:
        return snapshot_hash(self)


def snapshot_hash(snap: PolicySnapshot) -> str:
    """Content hash over the parameters and identity metadata (score excluded)."""
    h = hashlib.sha256()
    h.update(json.dumps([list(snap.layers), snap.session_id, snap.step, snap.version]).encode())
    for p in snap.params:
        h.update(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return h.hexdigest()[:16]


def snapshot_bytes(snap: PolicySnapshot) -> bytes:
    header = json.dumps({
        "layers": list(snap.layers),
        "session_id": snap.session_id,
        "step": snap.step,
        "driving_score": snap.driving_score,
        "version_tag": snap.version,
    }, sort_keys=True).encode()
    body = b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes() for p in snap.params)
    return MAGIC + struct.pack("<HI", FORMAT_VERSION, len(header)) + header + body


def snapshot_from_bytes(data: bytes) -> PolicySnapshot:
    n = len(MAGIC)
    if data[:n] != MAGIC or len(data) < n + 6:
        raise SnapshotError("not a snapshot file")
    version, hlen = struct.unpack("<HI", data[n:n + 6])
    if version != FORMAT_VERSION:
        raise SnapshotError(f"unsupported snapshot format version {version}")
    try:
        header = json.loads(data[n + 6:n + 6 + hlen].decode())
        layers = [int(x) for x in header["layers"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise SnapshotError(f"corrupt snapshot header: {exc}") from exc
    _check_layers(layers)
    off = n + 6 + hlen
    params = []
    for fan_in, fan_out in zip(layers[:-1], layers[1:]):
        for shape in ((fan_in, fan_out), (fan_out,)):
            size = int(np.prod(shape)) * 8
            chunk = data[off:off + size]
            if len(chunk) != size:
                raise SnapshotError("truncated snapshot body")
            params.append(np.frombuffer(chunk, dtype="<f8").reshape(shape).astype(np.float64))
            off += size
    if off != len(data):
        raise SnapshotError("trailing bytes after snapshot body")
    return PolicySnapshot(params, int(header["session_id"]), int(header["step"]),
                          header.get("driving_score"), header.get("version_tag", "v1"))


def save_snapshot(path: str | Path, snap: PolicySnapshot) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(snapshot_bytes(snap))
    tmp.replace(path)
    return path


def load_snapshot(path: str | Path) -> PolicySnapshot:
    return snapshot_from_bytes(Path(path).read_bytes())


def dde_bonus(self_params, peer_params: Sequence, obs: np.ndarray, alpha: float,
              temperature: float = T_DIST) -> float:
    """Mean over peers of ``alpha * KL(self || peer)`` on one observation."""
    if alpha == 0.0 or not peer_params:
        return 0.0
    logp = log_softmax(forward(self_params, obs), temperature)
    kls = [float(kl_divergence(logp, log_softmax(forward(p, obs), temperature))) for p in peer_params]
    return alpha * sum(kls) / len(kls)


def bonus_from_distributions(p_self, p_peers: Sequence, alpha: float) -> float:
    """Same bonus computed from explicit action distributions."""
    if alpha == 0.0 or not p_peers:
        return 0.0
    return alpha * sum(kl_probs(p_self, q) for q in p_peers) / len(p_peers)


def intrinsic_reward(r_env: float, policy, peers: Sequence, obs, alpha: float,
                     temperature: float = T_DIST) -> float:
    """Environment reward plus the peer-divergence bonus.

    ``policy`` and ``peers`` may be snapshots or raw parameter lists.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    unwrap = lambda p: p.params if isinstance(p, PolicySnapshot) else p  # noqa: E731
    obs = np.asarray(obs, dtype=np.float64)
    return r_env + dde_bonus(unwrap(policy), [unwrap(p) for p in peers], obs, alpha, temperature)
