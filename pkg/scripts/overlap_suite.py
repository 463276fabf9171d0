"""Functional overlap: tableau test against exhaustive valuation on random contentious pairs."""

import argparse

from shexdx.experiments import overlap_suite

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("-n", type=int, default=500)
ap.add_argument("--seed", type=int, default=1)
args = ap.parse_args()
tally = overlap_suite(args.n, args.seed)
print(tally.summary())
for pair, schema, a, b in tally.discrepancies[:5]:
    print(f"tableau={a} brute={b}\n  {pair.first}\n  {pair.second}\n  fds={schema.fds}")
raise SystemExit(0 if tally.ok else 1)
