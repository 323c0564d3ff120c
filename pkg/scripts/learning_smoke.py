"""Train one session on the straight lane and compare its best snapshot with a random policy."""
import argparse
import json

from divdrive.experiments import learning_smoke

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--steps", type=int, default=100_000)
ap.add_argument("--interval", type=int, default=10_000)
ap.add_argument("--eval-count", type=int, default=50)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()
res = learning_smoke(args.steps, args.interval, args.eval_count, seed=args.seed)
print(json.dumps(res, indent=2))
