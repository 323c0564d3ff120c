"""Driving-score filtering and greedy max-min (farthest point) policy selection."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .metrics import DistanceMatrix

log = logging.getLogger(__name__)


class NoCandidates(ValueError):
    pass


@dataclass
class Candidate:
    policy_id: str
    driving_score: float
    session_id: Optional[int] = None
    training_step: Optional[int] = None


@dataclass
class CandidatePool:
    candidates: list[Candidate]
    distances: DistanceMatrix

    @property
    def ids(self) -> list[str]:
        return [c.policy_id for c in self.candidates]

    def __len__(self):
        return len(self.candidates)

    def by_id(self, pid: str) -> Candidate:
        for c in self.candidates:
            if c.policy_id == pid:
                return c
        raise KeyError(pid)


def filter_by_score(pool: CandidatePool, delta: float) -> CandidatePool:
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    kept = [c for c in pool.candidates if c.driving_score >= delta]
    return CandidatePool(kept, pool.distances)


@dataclass
class Selection:
    ids: list[str]
    min_dist: list[float]  # min distance to the prefix at selection time (nan for the first)
    truncated: bool = False
    unreachable: list[str] = field(default_factory=list)


def _sort_key(pid: str):
    # numeric ids compare numerically so that "10" > "9"
    try:
        return (0, int(pid), "")
    except ValueError:
        return (1, 0, pid)


def select_diverse(pool: CandidatePool, k: int, seed: Optional[int] = None,
                   first: Optional[str] = None) -> Selection:
    """Greedy max-min selection of ``k`` policies.

    The first policy is drawn uniformly at random with ``seed`` unless
    ``first`` forces it. Each later pick maximizes its minimum distance to the
    already selected set; ties go to the lowest policy id. Pairs without a
    shared successful scenario count as -inf.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    ids = pool.ids
    if not ids:
        raise NoCandidates("filtered candidate pool is empty")
    truncated = k > len(ids)
    if truncated:
        log.warning("k=%d exceeds the %d filtered candidates; selecting all of them", k, len(ids))
        k = len(ids)
    rank = sorted(range(len(ids)), key=lambda i: _sort_key(ids[i]))
    order = {i: r for r, i in enumerate(rank)}
    if first is None:
        rng = np.random.default_rng(seed)
        start = int(rng.integers(len(ids)))
    else:
        start = ids.index(first)
    dm = pool.distances.submatrix(ids).values
    dm = np.where(np.isnan(dm), -np.inf, dm)

    chosen = [start]
    min_dists = [float("nan")]
    best = dm[start].copy()
    remaining = set(range(len(ids))) - {start}
    while len(chosen) < k:
        top = max(best[i] for i in remaining)
        winner = min((i for i in remaining if best[i] == top), key=order.__getitem__)
        chosen.append(winner)
        min_dists.append(float(top))
        remaining.discard(winner)
        best = np.minimum(best, dm[winner])
    unreachable = [ids[i] for i in range(len(ids))
                   if np.any(np.isinf(dm[i][np.arange(len(ids)) != i]))]
    if unreachable:
        log.warning("%d candidates lack a shared success with some peer", len(unreachable))
    return Selection([ids[i] for i in chosen], min_dists, truncated, unreachable)


def select_random(pool: CandidatePool, k: int, seed: Optional[int] = None) -> list[str]:
    """Uniform random subset of size ``min(k, |pool|)``; the baseline selector."""
    ids = pool.ids
    if not ids:
        raise NoCandidates("filtered candidate pool is empty")
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(ids), size=min(k, len(ids)), replace=False)
    return [ids[i] for i in sorted(pick)]


def exhaustive_best_subset(dmat: DistanceMatrix, ids: Sequence[str], k: int) -> tuple[list[str], float]:
    """Brute-force maximizer of mean pairwise distance; for tiny pools only."""
    best, best_val = None, -np.inf
    for combo in itertools.combinations(ids, k):
        vals = [dmat.get(p, q) for p, q in itertools.combinations(combo, 2)]
        v = float(np.mean(vals))
        if v > best_val:
            best, best_val = list(combo), v
    return best, best_val


def selection_report(pool: CandidatePool, sel: Selection) -> list[dict]:
    rows = []
    for rank, (pid, md) in enumerate(zip(sel.ids, sel.min_dist), 1):
        c = pool.by_id(pid)
        rows.append({
            "rank": rank,
            "policy_id": pid,
            "session_id": c.session_id,
            "training_step": c.training_step,
            "driving_score": c.driving_score,
            "min_dist_at_selection": None if np.isnan(md) else md,
        })
    return rows


def format_selection_report(rows: Sequence[dict]) -> str:
    cols = ["rank", "policy_id", "session_id", "training_step", "driving_score", "min_dist_at_selection"]
    out = [",".join(cols)]
    for r in rows:
        out.append(",".join("" if r[c] is None else str(r[c]) for c in cols))
    return "\n".join(out) + "\n"


def write_selection_report(path: str | Path, rows: Sequence[dict]) -> None:
    Path(path).write_text(format_selection_report(rows))
