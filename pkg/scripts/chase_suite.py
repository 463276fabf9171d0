"""Chase termination, trigger-order independence and completion equivalence.

Runs the example projects and random weakly-recursive settings.
"""

import argparse
import random
from pathlib import Path

from shexdx.experiments import corpus_suite, random_corpus
from shexdx.gen import random_valid_instance
from shexdx.io import Project

ROOT = Path(__file__).resolve().parent.parent

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--settings", type=int, default=100, help="number of random settings")
ap.add_argument("--runs", type=int, default=3, help="instances per setting")
ap.add_argument("--seed", type=int, default=11)
args = ap.parse_args()

corpus = []
for name, pool in (("bugtracker", ["1", "2", "3", "x"]), ("fourshape", ["1", "4", "7", "8", "x"])):
    project = Project.load(ROOT / "projects" / name)
    corpus.append((name, project.setting(), lambda r, p=project: p.instance()))
    corpus.append((f"{name}/random", project.setting(),
                   lambda r, p=project, pool=pool: random_valid_instance(r, p.source, pool, 12)))
corpus.extend(random_corpus(args.settings, args.seed))

tally = corpus_suite(corpus, args.runs, args.seed)
print(tally.summary())
for name, source, problems in tally.discrepancies[:5]:
    print(f"{name}: {problems}\n  source={sorted(source)}")
raise SystemExit(0 if tally.ok else 1)
