"""Diversity metrics over per-scenario trajectory sets.

Inter-policy diversity is the mean pairwise trajectory distance between
policies (averaged over scenarios both succeed in); overall diversity is the
scenario-averaged Wasserstein-1 distance between a policy set's successful
trajectories and a reference set. Lower overall diversity is better.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .trajectory import OUTCOMES, Trajectory, distance_matrix, trajectory_distance
from .transport import emd_uniform


class NoSharedScenario(ValueError):
    """Two policies have no scenario in which both reach the goal."""


class EmptySuccessSet(ValueError):
    """A scenario has no successful policy in the evaluated set."""


@dataclass
class EvaluationTable:
    """Outcome and trajectory of every (scenario, policy) cell."""

    scenarios: list[str] = field(default_factory=list)
    policies: list[str] = field(default_factory=list)
    outcome: dict[str, dict[str, str]] = field(default_factory=dict)
    trajectory: dict[str, dict[str, Trajectory]] = field(default_factory=dict)

    def add(self, scenario: str, policy: str, outcome: str, traj: Trajectory) -> None:
        if outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {outcome!r}")
        if scenario not in self.outcome:
            self.scenarios.append(scenario)
            self.outcome[scenario] = {}
            self.trajectory[scenario] = {}
        if policy not in self.policies:
            self.policies.append(policy)
        self.outcome[scenario][policy] = outcome
        self.trajectory[scenario][policy] = traj

    def check_complete(self) -> None:
        for s in self.scenarios:
            for p in self.policies:
                if p not in self.outcome[s] or p not in self.trajectory[s]:
                    raise ValueError(f"evaluation cell ({s}, {p}) is empty")

    def successes(self, policy: str) -> list[str]:
        return [s for s in self.scenarios if self.outcome[s].get(policy) == "GOAL"]

    def successful_policies(self, scenario: str, among: Optional[Sequence[str]] = None) -> list[str]:
        pool = self.policies if among is None else among
        return [p for p in pool if self.outcome[scenario].get(p) == "GOAL"]

    def driving_score(self, policy: str) -> float:
        return len(self.successes(policy)) / len(self.scenarios)

    def subset(self, policies: Sequence[str]) -> "EvaluationTable":
        out = EvaluationTable(list(self.scenarios), list(policies))
        for s in self.scenarios:
            out.outcome[s] = {p: self.outcome[s][p] for p in policies}
            out.trajectory[s] = {p: self.trajectory[s][p] for p in policies}
        return out


def _shared(table: EvaluationTable, p: str, q: str) -> list[str]:
    return [s for s in table.scenarios
            if table.outcome[s].get(p) == "GOAL" and table.outcome[s].get(q) == "GOAL"]


def pairwise_diversity(table: EvaluationTable, p: str, q: str) -> float:
    if p == q:
        raise ValueError("pairwise diversity needs two distinct policies")
    shared = _shared(table, p, q)
    if not shared:
        raise NoSharedScenario(f"policies {p!r} and {q!r} share no successful scenario")
    return float(np.mean([trajectory_distance(table.trajectory[s][p], table.trajectory[s][q])
                          for s in shared]))


@dataclass
class DistanceMatrix:
    ids: list[str]
    values: np.ndarray  # NaN where two policies share no success
    shared: np.ndarray

    def __post_init__(self):
        self._index = {pid: i for i, pid in enumerate(self.ids)}

    def index(self, pid: str) -> int:
        return self._index[pid]

    def get(self, p: str, q: str) -> float:
        return float(self.values[self._index[p], self._index[q]])

    def submatrix(self, ids: Sequence[str]) -> "DistanceMatrix":
        idx = [self._index[i] for i in ids]
        return DistanceMatrix(list(ids), self.values[np.ix_(idx, idx)].copy(),
                              self.shared[np.ix_(idx, idx)].copy())

    def to_dict(self) -> dict:
        return {
            "ids": list(self.ids),
            "values": [[None if np.isnan(v) else float(v) for v in row] for row in self.values],
            "shared": self.shared.astype(int).tolist(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DistanceMatrix":
        vals = np.array([[np.nan if v is None else v for v in row] for row in d["values"]],
                        dtype=np.float64).reshape(len(d["ids"]), len(d["ids"]))
        return cls(list(d["ids"]), vals, np.array(d["shared"], dtype=np.int64).reshape(vals.shape))


def build_distance_matrix(table: EvaluationTable, policies: Optional[Sequence[str]] = None) -> DistanceMatrix:
    ids = list(table.policies if policies is None else policies)
    n = len(ids)
    vals = np.zeros((n, n))
    shared = np.zeros((n, n), dtype=np.int64)
    succ = {p: set(table.successes(p)) for p in ids}
    for i in range(n):
        shared[i, i] = len(succ[ids[i]])
        for j in range(i + 1, n):
            common = succ[ids[i]] & succ[ids[j]]
            shared[i, j] = shared[j, i] = len(common)
            if common:
                d = pairwise_diversity(table, ids[i], ids[j])
            else:
                d = np.nan
            vals[i, j] = vals[j, i] = d
    return DistanceMatrix(ids, vals, shared)


def inter_policy_diversity(table: EvaluationTable | DistanceMatrix, policies: Sequence[str]) -> float:
    policies = list(policies)
    if len(policies) < 2:
        raise ValueError("inter-policy diversity needs at least two policies")
    if len(set(policies)) != len(policies):
        raise ValueError("policy set contains duplicates")
    total = 0.0
    for p, q in itertools.combinations(policies, 2):
        if isinstance(table, DistanceMatrix):
            d = table.get(p, q)
            if np.isnan(d):
                raise NoSharedScenario(f"policies {p!r} and {q!r} share no successful scenario")
        else:
            d = pairwise_diversity(table, p, q)
        total += d
    n = len(policies)
    return total / (n * (n - 1) / 2)


def wasserstein1(set_a: Sequence[Trajectory], set_b: Sequence[Trajectory]) -> float:
    if len(set_a) == 0 or len(set_b) == 0:
        raise ValueError("Wasserstein-1 needs two non-empty trajectory sets")
    return emd_uniform(distance_matrix(list(set_a), list(set_b)))


def overall_diversity_per_scenario(table: EvaluationTable, policies: Sequence[str],
                                   refs: Mapping[str, Sequence[Trajectory]],
                                   skip_empty: bool = False) -> dict[str, float]:
    out = {}
    for s in table.scenarios:
        winners = table.successful_policies(s, policies)
        if not winners:
            if skip_empty:
                continue
            raise EmptySuccessSet(f"no policy of the set succeeds in scenario {s!r}")
        ref = refs.get(s)
        if not ref:
            raise ValueError(f"no reference trajectories for scenario {s!r}")
        out[s] = wasserstein1([table.trajectory[s][p] for p in winners], ref)
    return out


def overall_diversity(table: EvaluationTable, policies: Sequence[str],
                      refs: Mapping[str, Sequence[Trajectory]], skip_empty: bool = False) -> float:
    """Scenario-averaged W1 to the references; ``skip_empty`` drops scenarios nobody solved."""
    per = overall_diversity_per_scenario(table, policies, refs, skip_empty)
    if not per:
        raise EmptySuccessSet("no scenario has a successful policy in the set")
    return float(np.mean(list(per.values())))


def success_rate_mean(table: EvaluationTable, policies: Sequence[str]) -> float:
    return float(np.mean([table.driving_score(p) for p in policies]))


def metrics_report(table: EvaluationTable, policies: Sequence[str],
                   refs: Optional[Mapping[str, Sequence[Trajectory]]] = None,
                   dmat: Optional[DistanceMatrix] = None, **extra) -> dict:
    """Report with the success rate, both diversities and the distance matrix."""
    policies = list(policies)
    if dmat is None:
        dmat = build_distance_matrix(table, policies)
    else:
        dmat = dmat.submatrix(policies)
    rep = {
        "success_rate_mean": success_rate_mean(table, policies),
        "inter_policy_diversity": inter_policy_diversity(dmat, policies) if len(policies) > 1 else None,
        "overall_diversity": overall_diversity(table, policies, refs) if refs is not None else None,
        "policies": policies,
        "distance_matrix": dmat.to_dict(),
    }
    rep.update(extra)
    return rep


def format_matrix_block(dmat: DistanceMatrix) -> str:
    """Plain-text matrix with policy ids as header row and column."""
    lines = ["," + ",".join(dmat.ids)]
    for pid, row in zip(dmat.ids, dmat.values):
        lines.append(pid + "," + ",".join("nan" if np.isnan(v) else repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_metrics_report(path: str | Path, report: Mapping) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def read_metrics_report(path: str | Path) -> dict:
    rep = json.loads(Path(path).read_text())
    rep["distance_matrix"] = DistanceMatrix.from_dict(rep["distance_matrix"])
    return rep
