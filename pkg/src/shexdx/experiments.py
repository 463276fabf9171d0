"""Seeded randomized suites that cross-check the decision procedures against oracles.

Each suite returns a :class:`Tally`; the acceptance tests and the scripts in
``scripts/`` call the same functions with the same default seeds.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .chase import chase, exchange, homomorphically_equivalent
from .consistency import contentious_pairs, functionally_overlapping, is_key_covered
from .core import Instance, rdf_to_inst, validate_typed_graph
from .gen import (
    random_contentious_rules, random_relational_schema, random_setting, random_shex, random_typed_graph,
    random_valid_instance,
)
from .mapping import Setting
from .oracles import brute_force_overlap, consistent_over_pool, count_maximal_valid_instances
from .shex2dep import compile as compile_shex
from .shex2dep import is_weakly_recursive, satisfies


@dataclass
class Tally:
    checked: int = 0
    positives: int = 0
    discrepancies: list = field(default_factory=list)
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def summary(self) -> str:
        more = "".join(f", {k}={v}" for k, v in self.extra.items())
        return (f"checked={self.checked}, positives={self.positives}, "
                f"discrepancies={len(self.discrepancies)}, seconds={self.seconds:.2f}{more}")


def validation_suite(n: int = 1000, seed: int = 3) -> Tally:
    """Validation of a typed graph agrees with satisfaction of the compiled dependencies."""
    rng = random.Random(seed)
    tally = Tally()
    start = time.perf_counter()
    for _ in range(n):
        s = random_shex(rng)
        g = random_typed_graph(rng, s)
        a = validate_typed_graph(g, s).ok
        b = satisfies(rdf_to_inst(g), compile_shex(s)).ok
        tally.checked += 1
        tally.positives += a
        if a != b:
            tally.discrepancies.append((s, g, a, b))
    tally.seconds = time.perf_counter() - start
    return tally


def overlap_suite(n: int = 500, seed: int = 1) -> Tally:
    """The tableau test for functional overlap agrees with exhaustive valuation."""
    rng = random.Random(seed)
    tally = Tally()
    start = time.perf_counter()
    while tally.checked < n:
        schema = random_relational_schema(rng, 2, 3, p_fd=0.9)
        r1, r2, s = random_contentious_rules(rng, schema)
        (pair,) = [q for q in contentious_pairs([r1, r2], s) if q.indices == (0, 1)]
        a = functionally_overlapping(pair, schema).ok
        b, _ = brute_force_overlap(pair, schema)
        tally.checked += 1
        tally.positives += a
        if a != b:
            tally.discrepancies.append((pair, schema, a, b))
    tally.seconds = time.perf_counter() - start
    return tally


def consistency_suite(
    n: int = 200, seed: int = 7, pool: Sequence[str] = ("0", "1", "2"), max_maximal: int = 400
) -> Tally:
    """Key coverage agrees with consistency over every valid instance on a small pool.

    Settings whose source schema has more than ``max_maximal`` maximal valid
    instances over ``pool`` are drawn but not counted; ``extra["skipped"]``
    records how many.
    """
    rng = random.Random(seed)
    tally = Tally(extra={"skipped": 0, "instances": 0})
    start = time.perf_counter()
    while tally.checked < n:
        setting = random_setting(rng)
        count = count_maximal_valid_instances(setting.source, pool)
        if count > max_maximal:
            tally.extra["skipped"] += 1
            continue
        tally.extra["instances"] += count
        a = is_key_covered(setting).ok
        b, witness = consistent_over_pool(setting, pool)
        tally.checked += 1
        tally.positives += a
        if a != b:
            tally.discrepancies.append((setting, a, b, witness))
    tally.seconds = time.perf_counter() - start
    return tally


def check_run(source: Instance, setting: Setting, budget: int = 100_000) -> list[str]:
    """Problems found when chasing ``source`` both ways and completing it; empty when all agree."""
    problems = []
    fwd = chase(source, setting, budget)
    rev = chase(source, setting, budget, order="reverse")
    for res in (fwd, rev):
        if res.status == "budget_exceeded":
            problems.append("budget exceeded")
    if problems:
        return problems
    if fwd.status != rev.status:
        return [f"orders disagree: {fwd.status} vs {rev.status}"]
    if fwd.status == "failed":
        return []
    if not homomorphically_equivalent(fwd.target, rev.target):  # type: ignore[arg-type]
        problems.append("orders give inequivalent results")
    done = exchange(source, setting, budget, complete=True)
    if done.completed is None:
        return problems + [f"completion path ended with {done.result.status}"]
    if not homomorphically_equivalent(fwd.target, done.completed):  # type: ignore[arg-type]
        problems.append("completion is not equivalent to the chase result")
    for g in (fwd.graph, done.graph):
        v = validate_typed_graph(g, setting.target)  # type: ignore[arg-type]
        if not v:
            problems.append("invalid graph: " + "; ".join(v.violations))
    return problems


def corpus_suite(
    corpus: Iterable[tuple[str, Setting, Callable[[random.Random], Instance]]],
    runs_per_setting: int = 3,
    seed: int = 11,
) -> Tally:
    """Run :func:`check_run` on named settings with generated instances."""
    rng = random.Random(seed)
    tally = Tally(extra={"failed": 0, "max_steps": 0})
    start = time.perf_counter()
    for name, setting, make in corpus:
        for _ in range(runs_per_setting):
            source = make(rng)
            problems = check_run(source, setting)
            res = chase(source, setting)
            tally.checked += 1
            tally.extra["max_steps"] = max(tally.extra["max_steps"], len(res.trace))
            if res.status == "failed":
                tally.extra["failed"] += 1
            else:
                tally.positives += 1
            if problems:
                tally.discrepancies.append((name, source, problems))
    tally.seconds = time.perf_counter() - start
    return tally


def random_corpus(n: int = 100, seed: int = 11, pool: Sequence[str] = ("0", "1", "2")):
    """``n`` random weakly-recursive fully-typed settings with an instance generator each."""
    rng = random.Random(seed)
    made = 0
    while made < n:
        setting = random_setting(rng)
        if not is_weakly_recursive(setting.target):
            continue
        made += 1
        yield f"random#{made}", setting, (lambda r, s=setting: random_valid_instance(r, s.source, list(pool), 8))
