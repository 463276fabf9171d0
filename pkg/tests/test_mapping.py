import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shexdx.core import LIT, Instance, Kind, SchemaError, Value, iri, lit
from shexdx.logic import Atom, ConfigurationError, DependencyError, FnTerm, Var
from shexdx.mapping import (
    ConstructorRegistry, NormalizedStTgd, NotFullyTypedError, StTgd, check_fully_typed,
    default_interpretation, normalize, registry_for,
)
from shexdx.shex2dep import satisfies
from shexdx.syntax import parse_mapping

from conftest import p

d, u = Var("d"), Var("u")
BUG_RULES = """
Bug(b, d, u) => Triple(bug2iri(b), :descr, d), TBug(bug2iri(b)), Lit(d);
Bug(b, d, u) => Triple(bug2iri(b), :rep, pers2iri(u)), TBug(bug2iri(b)), TUser(pers2iri(u));
"""


class TestNormalize:
    def test_fully_typed_bug_rules_unchanged(self):
        rules = parse_mapping(BUG_RULES)
        out = normalize(rules)
        assert len(out) == 2
        for r, n in zip(rules, out):
            assert n.head == r.head
            assert n.body == r.body
        assert out[0].object == d and out[0].object_type == LIT
        assert out[1].object == FnTerm("pers2iri", (u,)) and out[1].object_type == "TUser"

    def test_two_triple_head_splits(self):
        (rule,) = parse_mapping(
            "Bug(b, d, u) => Triple(bug2iri(b), :descr, d), Triple(bug2iri(b), :rep, pers2iri(u)),"
            " TBug(bug2iri(b)), Lit(d), TUser(pers2iri(u));"
        )
        out = normalize([rule])
        assert [n.predicate for n in out] == [p("descr"), p("rep")]
        assert out[0].body == out[1].body == rule.body

    def test_untyped_related_rule_rejected(self):
        rules = parse_mapping("Rel(b1, b2) => Triple(bug2iri(b1), :related, bug2iri(b2));")
        with pytest.raises(NotFullyTypedError) as e:
            normalize(rules)
        assert e.value.rule == 0
        assert "subject" in e.value.reason

    def test_untyped_object_rejected(self):
        rules = parse_mapping("User(u, n), Email(u, e) => Triple(pers2iri(u), :email, e), TUser(pers2iri(u));")
        with pytest.raises(NotFullyTypedError, match="object"):
            normalize(rules)

    def test_constructor_object_typed_lit_rejected(self):
        rules = parse_mapping("R(x) => Triple(f(x), :p, g(x)), T(f(x)), Lit(g(x));")
        with pytest.raises(NotFullyTypedError):
            normalize(rules)

    def test_stray_type_assertion(self):
        rules = parse_mapping("R(x, y) => Triple(f(x), :p, y), T(f(x)), Lit(y), T(f(y));")
        with pytest.raises(NotFullyTypedError, match="not attached"):
            normalize(rules)


class TestFullyTyped:
    def test_bug_rules_ok(self, bugtracker):
        rules = normalize(parse_mapping(BUG_RULES))
        reg = registry_for(rules)
        assert check_fully_typed(rules, bugtracker.target, reg)

    def test_bugtracker_setting_ok(self, bugtracker):
        assert bugtracker.setting().fully_typed()

    def test_predicate_not_in_schema(self, bugtracker):
        rules = normalize(parse_mapping("Bug(b, d, u) => Triple(bug2iri(b), :phone, d), TBug(bug2iri(b)), Lit(d);"))
        rep = check_fully_typed(rules, bugtracker.target, registry_for(rules))
        assert [v.code for v in rep.violations] == ["c"]

    def test_constructor_with_two_types(self, bugtracker):
        rules = normalize(parse_mapping(
            BUG_RULES + "User(u, n) => Triple(bug2iri(u), :name, n), TUser(bug2iri(u)), Lit(n);"
        ))
        rep = check_fully_typed(rules, bugtracker.target, registry_for(rules))
        assert "d" in {v.code for v in rep.violations}

    def test_unregistered_constructor(self, bugtracker):
        rules = normalize(parse_mapping(BUG_RULES))
        rep = check_fully_typed(rules, bugtracker.target, ConstructorRegistry({"bug2iri": 1}))
        assert {v.code for v in rep.violations} == {"b"}


class TestInterpretation:
    def test_deterministic(self):
        a = default_interpretation("bug2iri", (lit(1),))
        assert a == default_interpretation("bug2iri", (lit("1"),))
        assert a == iri("urn:dx:bug2iri:L1")

    def test_disjoint_symbols(self):
        assert default_interpretation("pers2iri", (lit(1),)) != default_interpretation("bug2iri", (lit(1),))

    def test_escaping_separates_arities(self):
        one = default_interpretation("f", (lit("a/b"),))
        two = default_interpretation("f", (lit("a"), lit("b")))
        assert one != two

    def test_arity_checked(self):
        with pytest.raises(ValueError):
            default_interpretation("f", (lit(1),), arity=2)

    values = st.builds(
        Value, st.sampled_from([Kind.IRI, Kind.LIT, Kind.BLANK]), st.text(alphabet="ab/:%L1", max_size=4)
    )

    @given(st.sampled_from(["f", "g", "f:g"]), st.lists(values, max_size=3),
           st.sampled_from(["f", "g", "f:g"]), st.lists(values, max_size=3))
    @settings(max_examples=300)
    def test_injective_and_disjoint(self, f1, a1, f2, a2):
        same = default_interpretation(f1, tuple(a1)) == default_interpretation(f2, tuple(a2))
        assert same == (f1 == f2 and a1 == a2)

    def test_registry_tables(self):
        reg = ConstructorRegistry({"pers2iri": 1}, {"pers2iri": {(lit(1),): iri("emp:jose")}})
        assert reg.interpret("pers2iri", (lit(1),)) == iri("emp:jose")
        assert reg.interpret("pers2iri", (lit(9),)).text.startswith("urn:dx:pers2iri:")
        with pytest.raises(ConfigurationError):
            reg.interpret("nope", (lit(1),))

    def test_registry_rejects_non_injective_table(self):
        with pytest.raises(SchemaError):
            ConstructorRegistry({"f": 1}, {"f": {(lit(1),): iri("x:a"), (lit(2),): iri("x:a")}})

    def test_registry_rejects_overlapping_tables(self):
        with pytest.raises(SchemaError):
            ConstructorRegistry({"f": 1, "g": 1}, {"f": {(lit(1),): iri("x:a")}, "g": {(lit(1),): iri("x:a")}})

    def test_registry_rejects_reserved_namespace(self):
        with pytest.raises(SchemaError):
            ConstructorRegistry({"f": 1}, {"f": {(lit(1),): iri("urn:dx:g:L1")}})


def test_sttgd_rejects_free_head_variable():
    with pytest.raises(DependencyError):
        StTgd((Atom("R", (Var("x"),)),), (Atom("Triple", (FnTerm("f", (Var("x"),)), p("p"), Var("y"))),))


def test_normalized_object_kind_invariant():
    with pytest.raises(ValueError):
        NormalizedStTgd((Atom("R", (Var("x"),)),), FnTerm("f", (Var("x"),)), "T", p("p"), Var("x"), "T")


@given(st.integers(0, 100_000))
@settings(max_examples=100, deadline=None)
def test_normalize_preserves_meaning(seed):
    """A split rule holds on an instance exactly when the original does."""
    rng = random.Random(seed)
    (rule,) = parse_mapping(
        "R(x, y) => Triple(f(x), :p, y), Triple(f(x), :q, g(y)), T(f(x)), Lit(y), U(g(y));"
    )
    split = normalize([rule])
    reg = registry_for([rule])
    vals = ["0", "1"]
    facts = [("R", (lit(rng.choice(vals)), lit(rng.choice(vals)))) for _ in range(rng.randint(0, 3))]
    nodes = [reg.interpret("f", (lit(v),)) for v in vals] + [reg.interpret("g", (lit(v),)) for v in vals]
    for _ in range(rng.randint(0, 8)):
        kind = rng.random()
        if kind < 0.4:
            facts.append(("Triple", (rng.choice(nodes[:2]), rng.choice([p("p"), p("q")]),
                                     rng.choice(nodes[2:] + [lit(v) for v in vals]))))
        elif kind < 0.6:
            facts.append(("T", (rng.choice(nodes),)))
        elif kind < 0.8:
            facts.append(("U", (rng.choice(nodes),)))
        else:
            facts.append(("Lit", (lit(rng.choice(vals)),)))
    inst = Instance.from_facts(facts)
    orig = bool(satisfies(inst, [rule.to_dependency()], reg))
    norm = bool(satisfies(inst, [r.to_dependency() for r in split], reg))
    assert orig == norm
