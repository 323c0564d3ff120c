"""Desk-scale experiments used by the acceptance suite and the scripts in ``scripts/``.

Each function returns a plain dict of measured numbers so callers can print,
assert or serialize them.
"""
from __future__ import annotations

import itertools
import time
from typing import Optional, Sequence

import numpy as np

from .learning.qnet import forward, log_softmax
from .learning.trainer import TrainerConfig, train_sessions
from .metrics import EvaluationTable, NoSharedScenario, build_distance_matrix, inter_policy_diversity
from .selection import Candidate, CandidatePool, filter_by_score, select_diverse, select_random
from .sim.world import Scenario, World, builtin_scenario, run_episode


class UniformRandomPolicy:
    """Uniform draw over the nine actions from its own seeded generator."""

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def act(self, obs) -> int:
        return int(self.rng.integers(9))


def evaluate(policies: dict, suite: Sequence[Scenario]) -> EvaluationTable:
    table = EvaluationTable()
    for sc in suite:
        for pid, pol in policies.items():
            res = run_episode(sc, pol, record=False)
            table.add(sc.key, pid, res.outcome, res.trajectory)
    return table


def screen_and_evaluate(policies: dict, suite: Sequence[Scenario], delta: float) -> tuple[EvaluationTable, dict]:
    """Evaluate each policy on ``suite`` but stop as soon as it can no longer reach score ``delta``.

    Returns the full table of the policies that pass plus every policy's
    score (a lower bound of the full-suite score for screened-out ones).
    """
    allowed = int((1.0 - delta) * len(suite) + 1e-9)
    table = EvaluationTable()
    scores = {}
    for pid, pol in policies.items():
        cells, fails = [], 0
        for sc in suite:
            res = run_episode(sc, pol, record=False)
            cells.append((sc.key, res.outcome, res.trajectory))
            fails += res.outcome != "GOAL"
            if fails > allowed:
                break
        scores[pid] = (len(cells) - fails) / len(suite)
        if fails <= allowed:
            for key, outcome, traj in cells:
                table.add(key, pid, outcome, traj)
    return table, scores


def learning_smoke(steps: int = 100_000, snapshot_interval: int = 10_000, eval_count: int = 50,
                   eval_seed: int = 1000, seed: int = 0, scenario: str = "straight_lane") -> dict:
    """Best snapshot score vs the uniform-random policy on the toy lane."""
    t0 = time.perf_counter()
    sc = builtin_scenario(scenario)
    cfg = TrainerConfig(total_steps=steps, snapshot_interval=snapshot_interval, seed=seed)
    res = train_sessions(cfg, sc, 1)
    suite = sc.suite(eval_count, eval_seed)
    table = evaluate({s.policy_id: s for s in res.snapshots}, suite)
    scores = {pid: table.driving_score(pid) for pid in table.policies}
    rnd = evaluate({"random": UniformRandomPolicy(seed)}, suite).driving_score("random")
    best = max(scores, key=lambda p: (scores[p], p))
    return {"scores": scores, "best": best, "best_score": scores[best], "random_score": rnd,
            "margin": scores[best] - rnd, "seconds": time.perf_counter() - t0}


def paired_selection(table: EvaluationTable, candidates: Sequence[Candidate], delta: float, k: int,
                     repetitions: int = 20, seed0: int = 0) -> dict:
    """PolicySelect vs RandomSelect inter-policy diversity on the same filtered pool."""
    pool = filter_by_score(CandidatePool(list(candidates), build_distance_matrix(table)), delta)
    pool = CandidatePool(pool.candidates, pool.distances.submatrix(pool.ids))
    rows = []
    for r in range(repetitions):
        ps = select_diverse(pool, k, seed=seed0 + r).ids
        rs = select_random(pool, k, seed=seed0 + r)
        a, b = _ip(pool.distances, ps), _ip(pool.distances, rs)
        rows.append({"seed": seed0 + r, "policy_select": a, "random_select": b,
                     "win": a is not None and (b is None or a >= b)})
    return {"pool_size": len(pool), "repetitions": rows, "wins": sum(r["win"] for r in rows)}


def _ip(dmat, ids) -> Optional[float]:
    try:
        return inter_policy_diversity(dmat, list(ids))
    except NoSharedScenario:
        return None


def rollout_observations(scenario: Scenario, n: int = 1000, seed: int = 0) -> np.ndarray:
    """``n`` observations of the ego met while a uniform-random policy drives seeded episodes."""
    rng = np.random.default_rng(seed)
    out = []
    ep = 0
    while len(out) < n:
        world = World(scenario.with_seed(scenario.seed + ep), UniformRandomPolicy(int(rng.integers(2**31))))
        while len(out) < n:
            out.append(world.observe(scenario.ego))
            if world.step().done:
                break
        ep += 1
    return np.array(out)


def mean_pairwise_kl(params: Sequence, obs: np.ndarray, temperature: float = 1.0) -> float:
    """Symmetrized KL between every pair of policies' softmax action distributions, averaged over ``obs``."""
    logs = [log_softmax(forward(p, obs), temperature) for p in params]
    vals = []
    for a, b in itertools.permutations(range(len(logs)), 2):
        pa = np.exp(logs[a])
        vals.append(float(np.mean(np.sum(pa * (logs[a] - logs[b]), axis=-1))))
    return float(np.mean(vals))


def dde_comparison(repetitions: int = 10, steps: int = 10_000, alpha: float = 0.01, n_obs: int = 1000,
                   scenario: str = "straight_lane", **trainer_overrides) -> dict:
    """Mean pairwise KL of final policies, bonus on vs off, paired by seed."""
    sc = builtin_scenario(scenario)
    obs = rollout_observations(sc, n_obs, seed=12345)
    rows = []
    bonus_ok = True
    t0 = time.perf_counter()
    for r in range(repetitions):
        kls = {}
        for a in (alpha, 0.0):
            base = dict(total_steps=steps, snapshot_interval=steps, seed=r, alpha=a)
            base.update(trainer_overrides)
            cfg = TrainerConfig(**base)

            def check(log):
                nonlocal bonus_ok
                bonus_ok = bonus_ok and log.r_total >= log.r_env

            res = train_sessions(cfg, sc, 2, dde=True, on_step=check)
            finals = [s.params for s in res.snapshots if s.step == steps]
            kls[a] = mean_pairwise_kl(finals, obs)
        rows.append({"seed": r, "kl_dde": kls[alpha], "kl_plain": kls[0.0], "win": kls[alpha] > kls[0.0]})
    return {"repetitions": rows, "wins": sum(r["win"] for r in rows), "bonus_never_negative": bool(bonus_ok),
            "seconds": time.perf_counter() - t0}


__all__ = ["UniformRandomPolicy", "evaluate", "learning_smoke", "paired_selection", "rollout_observations",
           "mean_pairwise_kl", "dde_comparison"]
