import random

from hypothesis import given, settings
from hypothesis import strategies as st

from shexdx.core import LIT, Instance, Multiplicity, ShexSchema, TripleConstraint, iri, rdf_to_inst
from shexdx.gen import ShexParams, random_shex
from shexdx.shex2dep import (
    compile, dependency_graph, format_dependency, is_weakly_recursive, mult_ge1, mult_le1, satisfies,
)

from conftest import p

ONE, OPT, STAR, PLUS = Multiplicity.ONE, Multiplicity.OPT, Multiplicity.STAR, Multiplicity.PLUS


def tuser_only(bugtracker):
    return ShexSchema({"TUser": bugtracker.target.defs["TUser"]})


class TestCompile:
    def test_tuser_yields_eight(self, bugtracker):
        deps = compile(tuser_only(bugtracker))
        labels = [d.label for d in deps]
        assert len(deps) == 8
        assert labels.count("tc") == 3
        assert labels.count("mult>=1") == 2
        assert labels.count("mult<=1") == 3
        ge1 = {d.name for d in deps if d.label == "mult>=1"}
        assert ge1 == {"mult>=1(TUser,:name)", "mult>=1(TUser,:email)"}

    def test_empty(self):
        assert compile(ShexSchema({})) == ()

    def test_star_only_tc(self):
        (d,) = compile(ShexSchema({"T": (TripleConstraint(p("p"), "T", STAR),)}))
        assert d.name == "tc(T,T,:p)"

    def test_order_is_shape_predicate_label(self, bugtracker):
        names = [d.name for d in compile(bugtracker.target)]
        assert names[:3] == ["tc(TBug,Lit,:descr)", "mult>=1(TBug,:descr)", "mult<=1(TBug,:descr)"]

    def test_text_form(self):
        d = mult_le1("T", p("p"))
        assert format_dependency(d) == "[mult<=1] T(x), Triple(x, :p, y), Triple(x, :p, z) => y = z"
        assert "exists y." in format_dependency(mult_ge1("T", p("p"), LIT))

    @given(st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_size_formula(self, seed):
        s = random_shex(random.Random(seed))
        expected = sum(
            1 + (c.mult in (ONE, PLUS)) + (c.mult in (ONE, OPT)) for cs in s.defs.values() for c in cs
        )
        assert len(compile(s)) == expected


class TestSatisfies:
    def test_expected_graph_is_a_model(self, expected, bugtracker):
        assert satisfies(rdf_to_inst(expected), compile(bugtracker.target))

    def test_egd_witness(self):
        a, b, c = iri("urn:a"), iri("urn:b"), iri("urn:c")
        inst = Instance.from_facts([("T", (a,)), ("Triple", (a, p("p"), b)), ("Triple", (a, p("p"), c))])
        res = satisfies(inst, [mult_le1("T", p("p"))])
        assert not res
        w = {str(v): val for v, val in res.witness.items()}
        assert {w["y"], w["z"]} == {b, c}

    def test_missing_existential(self):
        inst = Instance.from_facts([("T", (iri("urn:a"),))])
        assert not satisfies(inst, [mult_ge1("T", p("p"), "T")])


class TestDependencyGraph:
    def test_four_shape_edges(self, fourshape):
        g = dependency_graph(fourshape.target)
        assert g.edges == {
            ("TBug", "TUser", "strong"),
            ("TBug", "TBug", "weak"),
            ("TBug", "TEmp", "weak"),
            ("TEmp", "TTest", "strong"),
            ("TTest", "TBug", "strong"),
        }
        assert is_weakly_recursive(fourshape.target)

    def test_lit_only_has_no_edges(self, bugtracker):
        assert dependency_graph(tuser_only(bugtracker)).edges == frozenset()

    def test_strong_self_loop(self):
        s = ShexSchema({"T": (TripleConstraint(p("p"), "T", ONE),)})
        assert dependency_graph(s).edges == {("T", "T", "strong")}
        rec = is_weakly_recursive(s)
        assert not rec and rec.strong_cycle == ("T",)

    def test_cycle_through_plus(self):
        s = ShexSchema({
            "A": (TripleConstraint(p("p"), "B", PLUS),),
            "B": (TripleConstraint(p("q"), "A", ONE),),
        })
        assert set(is_weakly_recursive(s).strong_cycle) == {"A", "B"}

    @given(st.integers(0, 10_000), st.data())
    @settings(max_examples=80, deadline=None)
    def test_weakening_preserves_weak_recursion(self, seed, data):
        s = random_shex(random.Random(seed), ShexParams(lit_weight=0.2))
        weaker = {ONE: OPT, PLUS: STAR, OPT: OPT, STAR: STAR}
        defs = {}
        for t, cs in s.defs.items():
            defs[t] = tuple(
                TripleConstraint(c.predicate, c.target, weaker[c.mult] if data.draw(st.booleans()) else c.mult)
                for c in cs
            )
        if is_weakly_recursive(s):
            assert is_weakly_recursive(ShexSchema(defs))
