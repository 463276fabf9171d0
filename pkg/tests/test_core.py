import pytest

from shexdx.core import (
    LIT, ArityError, FunctionalDependency, Instance, Kind, Multiplicity, RelationalSchema,
    SchemaError, ShexSchema, TripleConstraint, TypedGraph, Value, blank, check_arities, check_fds,
    inst_to_rdf, iri, lit, null_lit, rdf_to_inst, validate_typed_graph,
)

from conftest import EXPECTED_NULL, p


def fd(rel, lhs, rhs):
    return FunctionalDependency(rel, frozenset(lhs), frozenset(rhs))


class TestValue:
    def test_null_flags(self):
        assert blank("b1").is_null
        assert null_lit(3).is_null
        assert not lit("x").is_null
        assert not iri("urn:x").is_null

    def test_structural_equality(self):
        assert lit("1") == lit(1)
        assert lit("a") != iri("a")
        assert blank("a") != lit("a")

    def test_ntriples_rendering(self):
        assert str(iri("urn:x")) == "<urn:x>"
        assert str(blank("b1")) == "_:b1"
        assert str(lit('say "hi"\n')) == '"say \\"hi\\"\\n"'


class TestSchemas:
    def test_fd_positions_validated(self):
        with pytest.raises(ValueError):
            FunctionalDependency("R", frozenset(), frozenset({1}))
        with pytest.raises(ValueError):
            FunctionalDependency("R", frozenset({0}), frozenset({1}))

    def test_fd_beyond_arity(self):
        with pytest.raises(SchemaError):
            RelationalSchema.from_arities({"R": 2}, [fd("R", {1}, {3})])

    def test_fd_on_undeclared_relation(self):
        with pytest.raises(SchemaError):
            RelationalSchema.from_arities({"R": 2}, [fd("S", {1}, {2})])

    def test_shex_rejects_duplicate_predicate(self):
        c = TripleConstraint(p("name"), LIT, Multiplicity.ONE)
        with pytest.raises(SchemaError):
            ShexSchema({"T": (c, c)})

    def test_shex_rejects_unknown_target(self):
        with pytest.raises(SchemaError):
            ShexSchema({"T": (TripleConstraint(p("q"), "U", Multiplicity.STAR),)})

    def test_multiplicity_bounds(self):
        assert [m.lower for m in Multiplicity] == [1, 0, 0, 1]
        assert [m.upper for m in Multiplicity] == [1, 1, None, None]
        assert Multiplicity.STAR.admits(7) and not Multiplicity.OPT.admits(2)


class TestCheckFds:
    def test_sample_instance_is_valid(self, bugtracker):
        assert check_fds(bugtracker.instance(), bugtracker.source) == []

    def test_empty_instance(self):
        schema = RelationalSchema.from_arities({"Email": 2}, [fd("Email", {1}, {2})])
        assert check_fds(Instance.from_facts([]), schema) == []

    def test_direct_contradiction(self):
        schema = RelationalSchema.from_arities({"Email": 2}, [fd("Email", {1}, {2})])
        inst = Instance.from_facts([("Email", (lit(1), lit("a"))), ("Email", (lit(1), lit("b")))])
        (v,) = check_fds(inst, schema)
        assert {v.first, v.second} == {(lit(1), lit("a")), (lit(1), lit("b"))}

    def test_arity_mismatch(self):
        schema = RelationalSchema.from_arities({"R": 2})
        with pytest.raises(ArityError):
            check_arities(Instance.from_facts([("R", (lit(1),))]), schema)


class TestGraphConversions:
    def test_expected_instance_has_17_triples(self, expected):
        inst = rdf_to_inst(expected)
        assert len(inst.relation("Triple")) == 17
        assert len(inst.relation("TBug")) == 4
        assert len(inst.relation("TUser")) == 3

    def test_round_trip(self, expected):
        assert inst_to_rdf(rdf_to_inst(expected)) == expected

    def test_single_triple(self):
        a, b = iri("urn:a"), iri("urn:b")
        g = TypedGraph(frozenset({(a, p("p"), b)}), {a: frozenset({"T"})})
        assert set(rdf_to_inst(g)) == {("Triple", (a, p("p"), b)), ("T", (a,))}

    def test_empty(self):
        assert len(rdf_to_inst(TypedGraph())) == 0
        assert inst_to_rdf(Instance.from_facts([])) == TypedGraph()

    def test_literal_subject_rejected(self):
        with pytest.raises(SchemaError):
            inst_to_rdf(Instance.from_facts([("Triple", (lit("s"), p("p"), lit("o")))]))

    def test_lit_type_on_iri_rejected(self):
        a = iri("urn:a")
        with pytest.raises(SchemaError):
            inst_to_rdf(Instance.from_facts([("Triple", (a, p("p"), a)), ("Lit", (a,))]))


class TestValidate:
    def test_expected_graph_correctly_typed(self, expected, bugtracker):
        assert validate_typed_graph(expected, bugtracker.target)

    def test_missing_required_email(self, expected, bugtracker):
        g = TypedGraph(
            frozenset(t for t in expected.triples if t[:2] != (iri("emp:jose"), p("email"))),
            {n: ts for n, ts in expected.typing.items() if n != lit("j@ex.com")},
        )
        v = validate_typed_graph(g, bugtracker.target)
        assert not v
        assert any("emp:jose" in m and "email" in m for m in v.violations)

    def test_lit_typed_iri(self):
        a = iri("urn:a")
        g = TypedGraph(frozenset({(a, p("p"), a)}), {a: frozenset({LIT})})
        assert not validate_typed_graph(g, ShexSchema({}))

    def test_blank_nodes_may_carry_shapes(self, bugtracker):
        b = blank("u")
        g = TypedGraph(
            frozenset({(b, p("name"), lit("n")), (b, p("email"), EXPECTED_NULL)}),
            {b: frozenset({"TUser"}), lit("n"): frozenset({LIT}), EXPECTED_NULL: frozenset({LIT})},
        )
        assert validate_typed_graph(g, bugtracker.target)

    def test_too_many_objects(self, bugtracker):
        u = iri("urn:u")
        g = TypedGraph(
            frozenset({(u, p("name"), lit("a")), (u, p("name"), lit("b")), (u, p("email"), lit("e"))}),
            {u: frozenset({"TUser"}), lit("a"): frozenset({LIT}), lit("b"): frozenset({LIT}), lit("e"): frozenset({LIT})},
        )
        assert not validate_typed_graph(g, bugtracker.target)


def test_value_kind_enum_is_string_valued():
    assert Kind.IRI.value == "iri"
    assert Value(Kind.LIT, "x") == lit("x")
