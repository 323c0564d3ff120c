"""Independent reference implementations used only by the tests.

They favor obviousness over speed: explicit loops, an LP solver for
transport, a plain re-statement of greedy max-min selection.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog


def naive_traj_distance(a, b):
    n = min(len(a), len(b))
    total = 0.0
    for i in range(n):
        total += math.sqrt((a[i][0] - b[i][0]) ** 2 + (a[i][1] - b[i][1]) ** 2)
    return total / n


def lp_emd(cost):
    """Exact transport between two uniform distributions via linear programming."""
    cost = np.asarray(cost, dtype=np.float64)
    m, n = cost.shape
    a_eq = []
    b_eq = []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n:(i + 1) * n] = 1.0
        a_eq.append(row)
        b_eq.append(1.0 / m)
    for j in range(n):
        col = np.zeros(m * n)
        col[j::n] = 1.0
        a_eq.append(col)
        b_eq.append(1.0 / n)
    res = linprog(cost.reshape(-1), A_eq=np.array(a_eq), b_eq=np.array(b_eq),
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


def greedy_maxmin(d, ids, k, start):
    """Re-statement of greedy farthest point selection on a full matrix."""
    d = [[(-math.inf if (isinstance(v, float) and math.isnan(v)) else v) for v in row] for row in d]
    chosen = [start]
    while len(chosen) < min(k, len(ids)):
        best_i, best_val = None, None
        for i in sorted(range(len(ids)), key=lambda i: ids[i]):
            if i in chosen:
                continue
            val = min(d[i][j] for j in chosen)
            if best_val is None or val > best_val:
                best_i, best_val = i, val
        chosen.append(best_i)
    return [ids[i] for i in chosen]


def central_diff(f, params, eps=1e-6):
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = p[idx]
            p[idx] = old + eps
            fp = f()
            p[idx] = old - eps
            fm = f()
            p[idx] = old
            g[idx] = (fp - fm) / (2 * eps)
        grads.append(g)
    return grads
