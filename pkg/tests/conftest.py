from pathlib import Path

import pytest

from shexdx.core import LIT, Kind, TypedGraph, Value, iri, lit
from shexdx.io import Project
from shexdx.mapping import Setting
from shexdx.syntax import parse_relational_schema
from shexdx.shex2dep import DEFAULT_PREFIX

ROOT = Path(__file__).resolve().parent.parent
BUGTRACKER = ROOT / "projects" / "bugtracker"
FOURSHAPE = ROOT / "projects" / "fourshape"


def p(name: str) -> Value:
    return iri(DEFAULT_PREFIX + name)


# The null email of the anonymous user, named differently from anything the chase emits.
EXPECTED_NULL = Value(Kind.LIT, "__null_expected")


def expected_graph() -> TypedGraph:
    bug = {i: iri(f"bug:{i}") for i in range(1, 5)}
    jose, edith, anon = iri("emp:jose"), iri("user:edith"), iri("anon:3")
    triples = {
        (bug[1], p("descr"), lit("Boom!")),
        (bug[2], p("descr"), lit("Kaboom!")),
        (bug[3], p("descr"), lit("Kabang!")),
        (bug[4], p("descr"), lit("Bang!")),
        (bug[1], p("rep"), jose),
        (bug[2], p("rep"), edith),
        (bug[3], p("rep"), jose),
        (bug[4], p("rep"), anon),
        (bug[1], p("related"), bug[3]),
        (bug[1], p("related"), bug[4]),
        (bug[2], p("related"), bug[4]),
        (jose, p("name"), lit("Jose")),
        (jose, p("email"), lit("j@ex.com")),
        (edith, p("name"), lit("Edith")),
        (edith, p("email"), lit("e@o.fr")),
        (anon, p("name"), lit("Steve89")),
        (anon, p("email"), EXPECTED_NULL),
    }
    typing = {b: frozenset({"TBug"}) for b in bug.values()}
    typing.update({u: frozenset({"TUser"}) for u in (jose, edith, anon)})
    typing.update({o: frozenset({LIT}) for _, _, o in triples if o.kind is Kind.LIT})
    return TypedGraph(frozenset(triples), typing)


@pytest.fixture
def expected() -> TypedGraph:
    return expected_graph()


@pytest.fixture(scope="session")
def bugtracker() -> Project:
    return Project.load(BUGTRACKER)


@pytest.fixture(scope="session")
def fourshape() -> Project:
    return Project.load(FOURSHAPE)


def with_email_key(project: Project, key_text: str) -> Setting:
    """The project's setting with the Email key replaced, e.g. ``"uid email"``."""
    rel = (project.root / "schema.rel").read_text()
    rel = rel.replace("key Email: uid;", f"key Email: {key_text};")
    source = parse_relational_schema(rel)
    base = project.setting()
    return Setting(source, base.target, base.rules, base.registry)
