"""Exact discrete optimal transport between uniform distributions.

Masses ``1/n_a`` and ``1/n_b`` are scaled to integers over the common
denominator ``lcm(n_a, n_b)``, and the transportation problem is solved as a
min-cost flow by successive shortest paths (Dijkstra with node potentials).
Flows are integral, costs stay in floating point.
"""
from __future__ import annotations

import math

import numpy as np


def _dijkstra(n: int, cap: np.ndarray, cost: np.ndarray, pot: np.ndarray, src: int):
    dist = np.full(n, np.inf)
    prev = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[src] = 0.0
    for _ in range(n):
        cand = np.where(done, np.inf, dist)
        u = int(np.argmin(cand))  # first minimum: lowest index on ties
        if not np.isfinite(cand[u]):
            break
        done[u] = True
        red = cost[u] + pot[u] - pot
        # round-off can leave tiny negative reduced costs on tight edges
        red = np.maximum(red, 0.0)
        nd = dist[u] + red
        upd = (cap[u] > 0) & ~done & (nd < dist)
        dist[upd] = nd[upd]
        prev[upd] = u
    return dist, prev


def transport_plan(cost: np.ndarray) -> tuple[np.ndarray, int]:
    """Optimal integer plan for uniform masses.

    Returns ``(flow, total)`` where ``flow[i, j]`` is an integer amount and
    every row sums to ``total / n_a``, every column to ``total / n_b``.
    """
    cost = np.asarray(cost, dtype=np.float64)
    na, nb = cost.shape
    if na == 0 or nb == 0:
        raise ValueError("transport problem needs non-empty supports")
    if not np.all(np.isfinite(cost)):
        raise ValueError("ground costs must be finite")
    total = math.lcm(na, nb)
    supply, demand = total // na, total // nb
    # nodes: 0 = source, 1..na = A, na+1..na+nb = B, last = sink
    n = na + nb + 2
    s, t = 0, n - 1
    a_idx = np.arange(1, na + 1)
    b_idx = np.arange(na + 1, na + nb + 1)
    cap = np.zeros((n, n), dtype=np.int64)
    cst = np.zeros((n, n))
    cap[s, a_idx] = supply
    cap[b_idx, t] = demand
    cap[np.ix_(a_idx, b_idx)] = total
    cst[np.ix_(a_idx, b_idx)] = cost
    cst[np.ix_(b_idx, a_idx)] = -cost.T
    # initial potentials: shortest distances in the acyclic initial graph
    pot = np.zeros(n)
    pot[b_idx] = cost.min(axis=0)
    pot[t] = pot[b_idx].min()
    sent = 0
    while sent < total:
        dist, prev = _dijkstra(n, cap, cst, pot, s)
        if not np.isfinite(dist[t]):
            raise RuntimeError("transport network disconnected")
        reach = np.isfinite(dist)
        pot[reach] += dist[reach]
        path = []
        v = t
        while v != s:
            u = int(prev[v])
            path.append((u, v))
            v = u
        push = min(int(cap[u, v]) for u, v in path)
        push = min(push, total - sent)
        for u, v in path:
            cap[u, v] -= push
            cap[v, u] += push
        sent += push
    flow = cap[np.ix_(b_idx, a_idx)].T.copy()
    return flow, total


def emd_uniform(cost: np.ndarray) -> float:
    """Wasserstein-1 value for uniform masses over a ground-cost matrix."""
    cost = np.asarray(cost, dtype=np.float64)
    flow, total = transport_plan(cost)
    return float(np.sum(flow * cost) / total)
