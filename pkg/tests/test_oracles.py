import random

from hypothesis import given, settings
from hypothesis import strategies as st

from shexdx.core import FunctionalDependency, RelationalSchema, check_fds, lit, rdf_to_inst, validate_typed_graph
from shexdx.gen import SettingParams, random_setting, random_shex, random_typed_graph
from shexdx.logic import Var
from shexdx.oracles import (
    _valuations, all_valid_instances, count_maximal_valid_instances, enumerate_solutions, has_solution,
    maximal_valid_instances, maximal_valid_relations,
)
from shexdx.shex2dep import compile, satisfies

TINY = SettingParams(max_relations=1, max_arity=2, max_shapes=2, max_rules=2, max_body_atoms=2)


def test_valuation_counts_are_bell_numbers():
    xs = [Var(f"x{i}") for i in range(4)]
    assert [sum(1 for _ in _valuations(xs[:k], [])) for k in range(5)] == [1, 1, 2, 5, 15]
    assert sum(1 for _ in _valuations(xs[:2], [lit("c")])) == 5


def test_maximal_relations_of_a_key():
    schema = RelationalSchema.from_arities({"R": 2}, [FunctionalDependency("R", frozenset({1}), frozenset({2}))])
    rels = maximal_valid_relations(schema, "R", ["0", "1"])
    assert len(rels) == 4 and all(len(r) == 2 for r in rels)
    assert count_maximal_valid_instances(schema, ["0", "1"]) == 4


def test_symmetry_reduction_keeps_one_per_orbit():
    schema = RelationalSchema.from_arities({"R": 1})
    assert len(maximal_valid_instances(schema, ["0", "1", "2"])) == 1
    assert len(list(all_valid_instances(schema, ["0", "1"]))) == 4


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_maximal_instances_decide_consistency(seed):
    """Checking maximal valid instances gives the same verdict as checking every valid instance."""
    rng = random.Random(seed)
    setting = random_setting(rng, TINY)
    pool = ["0", "1"]
    every = all(has_solution(i, setting) for i in all_valid_instances(setting.source, pool))
    maximal = all(has_solution(i, setting) for i in maximal_valid_instances(setting.source, pool, symmetry=True))
    assert every == maximal


@given(st.integers(0, 100_000))
@settings(max_examples=30, deadline=None)
def test_enumerated_solutions_are_solutions(seed):
    rng = random.Random(seed)
    setting = random_setting(rng, TINY)
    inst = maximal_valid_instances(setting.source, ["0", "1"])[0]
    assert not check_fds(inst, setting.source)
    deps = [*setting.st_dependencies(), *setting.target_dependencies()]
    for sol in enumerate_solutions(inst, setting, pool_size=2, limit=5):
        assert satisfies(inst.union(sol), deps, setting.registry)


@given(st.integers(0, 1_000_000))
@settings(max_examples=300, deadline=None)
def test_validation_matches_compiled_dependencies(seed):
    rng = random.Random(seed)
    s = random_shex(rng)
    g = random_typed_graph(rng, s)
    assert validate_typed_graph(g, s).ok == satisfies(rdf_to_inst(g), compile(s)).ok
