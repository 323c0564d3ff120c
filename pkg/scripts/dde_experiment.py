"""Paired comparison of final-policy divergence with and without the peer-KL bonus."""
import argparse
import json

from divdrive.experiments import dde_comparison

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--repetitions", type=int, default=10)
ap.add_argument("--steps", type=int, default=10_000)
ap.add_argument("--alpha", type=float, default=0.01)
ap.add_argument("--scenario", default="straight_lane")
args = ap.parse_args()
res = dde_comparison(args.repetitions, args.steps, args.alpha, scenario=args.scenario)
for r in res["repetitions"]:
    print(f"seed {r['seed']}: KL with bonus {r['kl_dde']:.6f}, without {r['kl_plain']:.6f}")
print(json.dumps({k: v for k, v in res.items() if k != "repetitions"}, indent=2))
