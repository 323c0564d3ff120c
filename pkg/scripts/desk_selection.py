"""Train several right-turn sessions, screen snapshots by driving score and compare selection methods."""
import argparse
import json
import time
from pathlib import Path

from divdrive.experiments import paired_selection, screen_and_evaluate
from divdrive.learning.snapshot import load_snapshot, save_snapshot
from divdrive.learning.trainer import TrainerConfig, train_sessions
from divdrive.selection import Candidate
from divdrive.sim.world import builtin_scenario

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", default="runs/desk_selection")
ap.add_argument("--sessions", type=int, default=4)
ap.add_argument("--steps", type=int, default=120_000)
ap.add_argument("--interval", type=int, default=1_000)
ap.add_argument("--eval-count", type=int, default=50)
ap.add_argument("--eval-seed", type=int, default=1000)
ap.add_argument("--delta", type=float, default=0.9)
ap.add_argument("--k", type=int, default=10)
ap.add_argument("--repetitions", type=int, default=20)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

out = Path(args.out)
snap_dir = out / "snapshots"
sc = builtin_scenario("right_turn")
t0 = time.perf_counter()
if snap_dir.exists():
    snaps = [load_snapshot(p) for p in sorted(snap_dir.glob("*.snap"))]
else:
    cfg = TrainerConfig(total_steps=args.steps, snapshot_interval=args.interval, seed=args.seed)
    snaps = train_sessions(cfg, sc, args.sessions).snapshots
    for s in snaps:
        save_snapshot(snap_dir / f"{s.policy_id}.snap", s)
print(f"{len(snaps)} snapshots ({time.perf_counter() - t0:.0f}s)", flush=True)
table, scores = screen_and_evaluate({s.policy_id: s for s in snaps}, sc.suite(args.eval_count, args.eval_seed),
                                    args.delta)
print(f"screened ({time.perf_counter() - t0:.0f}s); passing: {len(table.policies)}", flush=True)
cands = [Candidate(s.policy_id, scores[s.policy_id], s.session_id, s.step) for s in snaps
         if s.policy_id in table.policies]
res = paired_selection(table, cands, args.delta, args.k, args.repetitions)
res["scores"] = scores
res["sessions_in_pool"] = sorted({c.session_id for c in cands})
res["seconds"] = time.perf_counter() - t0
(out / "report.json").write_text(json.dumps(res, indent=2))
print(json.dumps({k: v for k, v in res.items() if k != "scores"}, indent=2))
