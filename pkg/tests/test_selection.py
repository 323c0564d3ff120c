import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divdrive.metrics import DistanceMatrix, inter_policy_diversity
from divdrive.selection import (Candidate, CandidatePool, NoCandidates, exhaustive_best_subset,
                                filter_by_score, format_selection_report, select_diverse, select_random,
                                selection_report)
from oracles import greedy_maxmin


def random_pool(n, seed, scores=None, nan_frac=0.0):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 3))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    if nan_frac:
        mask = np.triu(rng.random((n, n)) < nan_frac, 1)
        d[mask | mask.T] = np.nan
    ids = [f"p{i:02d}" for i in range(n)]
    scores = scores if scores is not None else [1.0] * n
    cands = [Candidate(pid, s, i % 4, 1000 * i) for i, (pid, s) in enumerate(zip(ids, scores))]
    return CandidatePool(cands, DistanceMatrix(ids, d, np.ones((n, n), dtype=int)))


def test_filter_keeps_threshold_and_order():
    pool = random_pool(5, 0, [0.95, 0.5, 0.9, 1.0, 0.89])
    kept = filter_by_score(pool, 0.9)
    assert kept.ids == ["p00", "p02", "p03"]
    assert filter_by_score(pool, 0.0).ids == pool.ids
    assert filter_by_score(pool, 1.0).ids == ["p03"]
    with pytest.raises(ValueError):
        filter_by_score(pool, 1.5)


def test_hand_example_line():
    # points on a line at 0, 1, 5, 6; start at 0 -> farthest is 6, then 1 vs 5 tie at distance 1 -> lower id
    xs = [0.0, 1.0, 5.0, 6.0]
    ids = ["a", "b", "c", "d"]
    d = np.abs(np.subtract.outer(xs, xs))
    pool = CandidatePool([Candidate(i, 1.0) for i in ids], DistanceMatrix(ids, d, np.ones((4, 4), int)))
    sel = select_diverse(pool, 3, first="a")
    assert sel.ids == ["a", "d", "b"]
    assert sel.min_dist[1:] == [6.0, 1.0]


def test_k_exceeds_pool_returns_all(caplog):
    pool = random_pool(4, 1)
    sel = select_diverse(pool, 10, seed=0)
    assert sel.truncated and sorted(sel.ids) == pool.ids
    assert "exceeds" in caplog.text


def test_empty_pool():
    pool = filter_by_score(random_pool(3, 0, [0.1, 0.2, 0.3]), 0.9)
    with pytest.raises(NoCandidates):
        select_diverse(pool, 2, seed=0)
    with pytest.raises(NoCandidates):
        select_random(pool, 2, seed=0)


def test_numeric_ids_tie_break():
    ids = ["10", "9", "2"]
    d = np.ones((3, 3)) - np.eye(3)
    pool = CandidatePool([Candidate(i, 1.0) for i in ids], DistanceMatrix(ids, d, np.ones((3, 3), int)))
    assert select_diverse(pool, 3, first="10").ids == ["10", "2", "9"]


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 20), st.integers(1, 10), st.integers(0, 10**6))
def test_matches_oracle(n, k, seed):
    pool = random_pool(n, seed)
    sel = select_diverse(pool, k, seed=seed)
    start = pool.ids.index(sel.ids[0])
    assert sel.ids == greedy_maxmin(pool.distances.values.tolist(), pool.ids, k, start)
    assert len(set(sel.ids)) == len(sel.ids) == min(n, k)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 12), st.integers(2, 6), st.integers(0, 10**6))
def test_nan_counts_as_minus_infinity(n, k, seed):
    pool = random_pool(n, seed, nan_frac=0.3)
    sel = select_diverse(pool, k, seed=seed)
    start = pool.ids.index(sel.ids[0])
    assert sel.ids == greedy_maxmin(pool.distances.values.tolist(), pool.ids, k, start)


def test_seeded_first_pick_is_deterministic():
    pool = random_pool(12, 5)
    assert select_diverse(pool, 4, seed=3).ids == select_diverse(pool, 4, seed=3).ids


def test_random_selection():
    pool = random_pool(10, 2)
    a = select_random(pool, 4, seed=1)
    assert a == select_random(pool, 4, seed=1)
    assert len(set(a)) == 4 and set(a) <= set(pool.ids)
    assert sorted(select_random(pool, 20, seed=1)) == pool.ids


def test_exhaustive_is_upper_bound():
    pool = random_pool(7, 4)
    best, val = exhaustive_best_subset(pool.distances, pool.ids, 3)
    sel = select_diverse(pool, 3, seed=0)
    assert inter_policy_diversity(pool.distances, sel.ids) <= val + 1e-12
    assert math.isclose(inter_policy_diversity(pool.distances, best), val, rel_tol=1e-12)


def test_report_rows():
    pool = random_pool(5, 3, [0.9, 0.95, 1.0, 0.92, 0.99])
    sel = select_diverse(pool, 3, seed=0)
    rows = selection_report(pool, sel)
    assert [r["rank"] for r in rows] == [1, 2, 3]
    assert rows[0]["min_dist_at_selection"] is None
    text = format_selection_report(rows)
    assert text.splitlines()[0] == "rank,policy_id,session_id,training_step,driving_score,min_dist_at_selection"
    assert len(text.splitlines()) == 4
