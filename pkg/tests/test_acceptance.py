"""The seven acceptance criteria, one test each, each printing a PASS/FAIL line."""

import time

import pytest

from shexdx.chase import chase, find_homomorphism
from shexdx.consistency import is_key_covered
from shexdx.core import Kind, rdf_to_inst
from shexdx.experiments import corpus_suite, validation_suite, random_corpus, consistency_suite, overlap_suite
from shexdx.gen import random_valid_instance

from conftest import EXPECTED_NULL, expected_graph, with_email_key


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
    return emit


def test_criterion_1_bugtracker_end_to_end(bugtracker, report):
    start = time.perf_counter()
    setting = bugtracker.setting()
    res = chase(bugtracker.instance(), setting)
    elapsed = time.perf_counter() - start
    g = res.graph
    nulls = sorted(n for n in g.nodes() if n.is_null) if g else []
    expected = rdf_to_inst(expected_graph())
    forward = find_homomorphism(res.target, expected) if res.ok else None
    backward = find_homomorphism(expected, res.target) if res.ok else None
    ok = (
        res.ok and len(g.triples) == 17 and len(nulls) == 1 and nulls[0].kind is Kind.LIT
        and forward is not None and backward is not None and elapsed < 1.0
    )
    report(1, "bug tracker end to end", ok,
           f"triples={len(g.triples) if g else None}, nulls={len(nulls)}, "
           f"hom both ways={forward is not None and backward is not None}, seconds={elapsed:.3f}")
    assert res.ok
    assert len(g.triples) == 17
    assert len(nulls) == 1 and nulls[0].kind is Kind.LIT
    assert forward is not None and forward(nulls[0]) == EXPECTED_NULL
    assert backward is not None and backward(EXPECTED_NULL) == nulls[0]
    assert elapsed < 1.0


def test_criterion_2_validation_matches_compiled_dependencies(report):
    tally = validation_suite(n=1000, seed=3)
    ok = tally.checked >= 1000 and tally.ok and tally.seconds < 10
    report(2, "typed-graph validation vs compiled dependencies", ok, tally.summary())
    assert tally.checked >= 1000
    assert tally.discrepancies == []
    assert tally.seconds < 10


def test_criterion_3_key_coverage_matches_consistency(report):
    tally = consistency_suite(n=200, seed=7, pool=("0", "1", "2"))
    ok = tally.checked >= 200 and tally.ok and tally.seconds < 60
    report(3, "key coverage vs consistency over a 3-value pool", ok, tally.summary())
    assert tally.checked >= 200
    assert tally.discrepancies == []
    assert tally.seconds < 60


def test_criterion_4_overlap_matches_brute_force(report):
    tally = overlap_suite(n=500, seed=1)
    ok = tally.checked >= 500 and tally.ok
    report(4, "functional overlap vs exhaustive valuation", ok, tally.summary())
    assert tally.checked >= 500
    assert tally.discrepancies == []


@pytest.fixture(scope="module")
def corpus_tally(bugtracker, fourshape):
    """Random instances of both example projects plus 100 random weakly-recursive settings."""
    corpus = [
        ("bugtracker", bugtracker.setting(),
         lambda r: random_valid_instance(r, bugtracker.source, ["1", "2", "3", "x"], 10)),
        ("fourshape", fourshape.setting(),
         lambda r: random_valid_instance(r, fourshape.source, ["1", "4", "7", "8", "x"], 12)),
        *random_corpus(n=100, seed=11),
    ]
    fixed = [(p.root.name, p.setting(), lambda r, p=p: p.instance()) for p in (bugtracker, fourshape)]
    return corpus_suite([*fixed, *corpus], runs_per_setting=3, seed=11)


def _with(tally, word):
    return [d for d in tally.discrepancies if any(word in m for m in d[2])]


def test_criterion_5_termination_and_order_independence(corpus_tally, report):
    tally = corpus_tally
    budget, order = _with(tally, "budget"), _with(tally, "order")
    ok = not budget and not order
    report(5, "termination under budget and trigger-order independence", ok,
           f"runs={tally.checked}, failed={tally.extra['failed']}, max_steps={tally.extra['max_steps']}, "
           f"budget exceeded={len(budget)}, order disagreements={len(order)}")
    assert not budget
    assert not order


def test_criterion_6_key_flip(bugtracker, report):
    covered = is_key_covered(bugtracker.setting())
    multikey = with_email_key(bugtracker, "uid email")
    flipped = is_key_covered(multikey)
    w = flipped.witness
    self_pair = (
        w is not None and w.first.origin == w.second.origin
        and w.predicate.text.endswith("email")
    )
    cx = flipped.counterexample
    res = chase(cx, multikey) if cx is not None else None
    ok = covered.ok and not flipped.ok and self_pair and res is not None and res.status == "failed"
    report(6, "key flip on the Email relation", ok,
           f"uid key covered={covered.ok}, (uid,email) key covered={flipped.ok}, self-pair witness={self_pair}, "
           f"counterexample chase={res.status if res else None}")
    assert covered.ok
    assert not flipped.ok
    assert self_pair
    assert res is not None and res.status == "failed"
    assert res.failure.dependency.name == "mult<=1(TUser,:email)"


def test_criterion_7_completion_equivalence(corpus_tally, report):
    tally = corpus_tally
    problems = [d for d in tally.discrepancies if d not in _with(tally, "budget") + _with(tally, "order")]
    report(7, "completion vs chase equivalence and validity", not problems,
           f"successful runs={tally.positives}, problems={len(problems)}")
    assert tally.positives > 0
    assert problems == []
