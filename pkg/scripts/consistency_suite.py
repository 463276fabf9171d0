"""Key coverage against consistency checked over every valid instance on a small value pool."""

import argparse

from shexdx.experiments import consistency_suite

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("-n", type=int, default=200)
ap.add_argument("--seed", type=int, default=7)
ap.add_argument("--pool", default="0,1,2", help="comma-separated source values")
ap.add_argument("--max-maximal", type=int, default=400,
                help="skip settings with more maximal valid instances than this")
args = ap.parse_args()
tally = consistency_suite(args.n, args.seed, tuple(args.pool.split(",")), args.max_maximal)
print(tally.summary())
for setting, a, b, witness in tally.discrepancies[:5]:
    print(f"key_covered={a} consistent={b}\n  rules={[str(r) for r in setting.rules]}\n  witness={witness}")
raise SystemExit(0 if tally.ok else 1)
