"""Hand-constructed evaluation fixtures with hand-computed diversity values."""
from __future__ import annotations

import numpy as np

from divdrive.metrics import EvaluationTable
from divdrive.trajectory import Trajectory


def line(y, n=5, x0=0.0):
    return Trajectory(np.array([[x0 + i, y] for i in range(n)], dtype=float))


def table_from(cells):
    """``cells``: {scenario: {policy: (outcome, trajectory)}}."""
    t = EvaluationTable()
    for s, row in cells.items():
        for p, (o, tr) in row.items():
            t.add(s, p, o, tr)
    return t


def metric_fixtures():
    """(name, kind, args, expected) tuples; every value computed by hand."""
    out = []
    # trajectory distance
    out.append(("parallel-3", "traj", (line(0), line(3)), 3.0))
    out.append(("offset-3-4-5", "traj", (line(0), Trajectory(np.array([[3 + i, 4.0] for i in range(5)]))), 5.0))
    out.append(("prefix-only", "traj", (line(0, 8), line(2, 3)), 2.0))
    cross_a = Trajectory(np.array([[0, 0], [1, 0], [2, 0]], dtype=float))
    cross_b = Trajectory(np.array([[0, 1], [1, 0], [2, -1]], dtype=float))
    out.append(("crossing", "traj", (cross_a, cross_b), 2.0 / 3.0))
    diag = Trajectory(np.array([[i, i] for i in range(4)], dtype=float))
    out.append(("diverging", "traj", (line(0, 4), diag), 1.5))
    # pairwise diversity
    t1 = table_from({
        "s1": {"p": ("GOAL", line(0)), "q": ("GOAL", line(1))},
        "s2": {"p": ("GOAL", line(0)), "q": ("GOAL", line(3))},
    })
    out.append(("pair-two-shared", "pair", (t1, "p", "q"), 2.0))
    t2 = table_from({
        "s1": {"p": ("GOAL", line(0)), "q": ("GOAL", line(1))},
        "s2": {"p": ("GOAL", line(0)), "q": ("COLLISION", line(100))},
        "s3": {"p": ("TIMEOUT", line(0)), "q": ("GOAL", line(50))},
    })
    out.append(("pair-only-shared-success", "pair", (t2, "p", "q"), 1.0))
    # inter-policy diversity
    t3 = table_from({"s1": {"a": ("GOAL", line(0)), "b": ("GOAL", line(1)), "c": ("GOAL", line(3))}})
    out.append(("ip-three", "ip", (t3, ["a", "b", "c"]), (1 + 3 + 2) / 3))
    t4 = table_from({
        "s1": {"a": ("GOAL", line(0)), "b": ("GOAL", line(2)), "c": ("COLLISION", line(0))},
        "s2": {"a": ("GOAL", line(0)), "b": ("GOAL", line(4)), "c": ("GOAL", line(1))},
    })
    # d(a,b) = (2+4)/2 = 3; d(a,c) = 1 (s2 only); d(b,c) = 3 (s2 only)
    out.append(("ip-mixed-shared", "ip", (t4, ["a", "b", "c"]), (3 + 1 + 3) / 3))
    t5 = table_from({"s1": {f"p{i}": ("GOAL", line(float(i))) for i in range(4)}})
    # pairwise |i-j| over 6 pairs: 1,2,3,1,2,1 -> 10/6
    out.append(("ip-four-lines", "ip", (t5, ["p0", "p1", "p2", "p3"]), 10.0 / 6.0))
    out.append(("ip-subset", "ip", (t5, ["p0", "p3"]), 3.0))
    return out
