"""Trajectories, the average-Euclidean trajectory distance, and trajectory logs."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

DT = 0.1
OUTCOMES = ("GOAL", "COLLISION", "TIMEOUT")


class InvalidTrajectory(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Positions of a vehicle center, one row per simulation step.

    ``speed``, ``heading``, ``steering`` and ``accel`` are optional per-point
    channels kept for logging and plotting; they never enter the distance.
    """

    points: np.ndarray
    timestep: float = DT
    speed: Optional[np.ndarray] = None
    heading: Optional[np.ndarray] = None
    steering: Optional[np.ndarray] = None
    accel: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            pts = pts.reshape(-1, 2)
        if len(pts) == 0:
            raise InvalidTrajectory("trajectory must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidTrajectory("trajectory coordinates must be finite")
        if not self.timestep > 0:
            raise InvalidTrajectory("timestep must be positive")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        for name in ("speed", "heading", "steering", "accel"):
            val = getattr(self, name)
            if val is not None:
                arr = np.asarray(val, dtype=np.float64).reshape(-1)
                if len(arr) != len(pts):
                    raise InvalidTrajectory(f"{name} length {len(arr)} != {len(pts)} points")
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self.timestep == other.timestep and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.timestep, self.points.tobytes()))

    def translated(self, dx: float, dy: float) -> "Trajectory":
        return Trajectory(self.points + np.array([dx, dy]), self.timestep)

    def scaled(self, c: float) -> "Trajectory":
        return Trajectory(self.points * c, self.timestep)


def trajectory_distance(a: Trajectory, b: Trajectory) -> float:
    """Mean Euclidean gap between two trajectories over their common prefix."""
    if len(a) == 0 or len(b) == 0:
        raise InvalidTrajectory("empty trajectory")
    if not math.isclose(a.timestep, b.timestep, rel_tol=1e-12, abs_tol=0.0):
        raise InvalidTrajectory(f"timestep mismatch: {a.timestep} vs {b.timestep}")
    n = min(len(a), len(b))
    diff = a.points[:n] - b.points[:n]
    return float(np.mean(np.hypot(diff[:, 0], diff[:, 1])))


def distance_matrix(xs: list[Trajectory], ys: list[Trajectory]) -> np.ndarray:
    """Ground-cost matrix ``C[i, j] = trajectory_distance(xs[i], ys[j])``."""
    out = np.empty((len(xs), len(ys)))
    for i, a in enumerate(xs):
        for j, b in enumerate(ys):
            out[i, j] = trajectory_distance(a, b)
    return out


# ---------------------------------------------------------------------------
# Trajectory log files
#
# One CSV-like record per line:
#   step record:     scenario_id,policy_id,step,x,y,v,theta,phi,a
#   summary record:  scenario_id,policy_id,outcome,steps
# Lines starting with '#' are header/comment lines (key=value).
# Floats are written with repr(), so a parse returns the exact value.
# ---------------------------------------------------------------------------


@dataclass
class LogEntry:
    scenario_id: str
    policy_id: str
    trajectory: Trajectory
    outcome: Optional[str] = None
    steps: Optional[int] = None


@dataclass
class TrajectoryLog:
    entries: list[LogEntry] = field(default_factory=list)
    header: dict[str, str] = field(default_factory=dict)

    def get(self, scenario_id: str, policy_id: str) -> LogEntry:
        for e in self.entries:
            if e.scenario_id == scenario_id and e.policy_id == policy_id:
                return e
        raise KeyError((scenario_id, policy_id))


def _check_id(s: str) -> str:
    s = str(s)
    if "," in s or "\n" in s:
        raise ValueError(f"identifier may not contain ',' or newline: {s!r}")
    return s


def format_entry(entry: LogEntry) -> str:
    tr = entry.trajectory
    n = len(tr)
    zeros = np.zeros(n)
    v = tr.speed if tr.speed is not None else zeros
    th = tr.heading if tr.heading is not None else zeros
    ph = tr.steering if tr.steering is not None else zeros
    ac = tr.accel if tr.accel is not None else zeros
    sid, pid = _check_id(entry.scenario_id), _check_id(entry.policy_id)
    buf = io.StringIO()
    for i in range(n):
        x, y = tr.points[i]
        buf.write(
            f"{sid},{pid},{i},{float(x)!r},{float(y)!r},{float(v[i])!r},"
            f"{float(th[i])!r},{float(ph[i])!r},{float(ac[i])!r}\n"
        )
    if entry.outcome is not None:
        if entry.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {entry.outcome!r}")
        steps = entry.steps if entry.steps is not None else n - 1
        buf.write(f"{sid},{pid},{entry.outcome},{int(steps)}\n")
    return buf.getvalue()


def format_log(log: TrajectoryLog) -> str:
    head = "".join(f"# {k}={v}\n" for k, v in log.header.items())
    return head + "".join(format_entry(e) for e in log.entries)


def write_log(path: str | Path, log: TrajectoryLog) -> None:
    Path(path).write_text(format_log(log))


def parse_log(text: str, timestep: float = DT) -> TrajectoryLog:
    header: dict[str, str] = {}
    rows: dict[tuple[str, str], list[list[float]]] = {}
    order: list[tuple[str, str]] = []
    summaries: dict[tuple[str, str], tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                header[k.strip()] = v.strip()
            continue
        parts = line.split(",")
        if len(parts) == 9:
            key = (parts[0], parts[1])
            if key not in rows:
                rows[key] = []
                order.append(key)
            step = int(parts[2])
            if step != len(rows[key]):
                raise ValueError(f"line {lineno}: step {step} out of order")
            rows[key].append([float(p) for p in parts[3:]])
        elif len(parts) == 4:
            if parts[2] not in OUTCOMES:
                raise ValueError(f"line {lineno}: unknown outcome {parts[2]!r}")
            key = (parts[0], parts[1])
            summaries[key] = (parts[2], int(parts[3]))
            if key not in rows:
                raise ValueError(f"line {lineno}: summary without step records")
        else:
            raise ValueError(f"line {lineno}: expected 9 or 4 fields, got {len(parts)}")
    entries = []
    for key in order:
        arr = np.array(rows[key])
        tr = Trajectory(arr[:, 0:2], timestep, speed=arr[:, 2], heading=arr[:, 3],
                        steering=arr[:, 4], accel=arr[:, 5])
        outcome, steps = summaries.get(key, (None, None))
        entries.append(LogEntry(key[0], key[1], tr, outcome, steps))
    return TrajectoryLog(entries, header)


def read_log(path: str | Path, timestep: float = DT) -> TrajectoryLog:
    return parse_log(Path(path).read_text(), timestep)

