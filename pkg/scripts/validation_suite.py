"""Typed-graph validation against the compiled dependencies on random pairs."""

import argparse

from shexdx.experiments import validation_suite

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("-n", type=int, default=1000)
ap.add_argument("--seed", type=int, default=3)
args = ap.parse_args()
tally = validation_suite(args.n, args.seed)
print(tally.summary())
for s, g, a, b in tally.discrepancies[:5]:
    print(f"validate={a} satisfies={b}\n  schema={s}\n  graph={g}")
raise SystemExit(0 if tally.ok else 1)
