"""Compile ShEx schemas into tgds/egds and analyse their dependency graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import networkx as nx

from .core import LIT, TRIPLE, Instance, Kind, Multiplicity, ShexSchema, Value
from .logic import Atom, Dependency, FactStore, Var, evaluate, partially_ground

if TYPE_CHECKING:
    from .mapping import ConstructorRegistry

DEFAULT_PREFIX = "urn:dx:p:"

_LABEL_RANK = {"tc": 0, "mult>=1": 1, "mult<=1": 2}

_x, _y, _z = Var("x"), Var("y"), Var("z")


def short_iri(v: Value) -> str:
    """Render predicates in the default namespace as ``:local``."""
    if v.kind is Kind.IRI and v.text.startswith(DEFAULT_PREFIX):
        return ":" + v.text[len(DEFAULT_PREFIX):]
    return str(v)


def tc(shape: str, target: str, p: Value) -> Dependency:
    return Dependency(
        "tgd",
        body=(Atom(shape, (_x,)), Atom(TRIPLE, (_x, p, _y))),
        head=(Atom(target, (_y,)),),
        label="tc",
        name=f"tc({shape},{target},{short_iri(p)})",
    )


def mult_ge1(shape: str, p: Value, target: str) -> Dependency:
    kind = Kind.LIT if target == LIT else Kind.BLANK
    return Dependency(
        "tgd",
        body=(Atom(shape, (_x,)),),
        head=(Atom(TRIPLE, (_x, p, _y)),),
        existentials=(_y,),
        label="mult>=1",
        name=f"mult>=1({shape},{short_iri(p)})",
        null_kinds=((_y, kind),),
    )


def mult_le1(shape: str, p: Value) -> Dependency:
    return Dependency(
        "egd",
        body=(Atom(shape, (_x,)), Atom(TRIPLE, (_x, p, _y)), Atom(TRIPLE, (_x, p, _z))),
        equality=(_y, _z),
        label="mult<=1",
        name=f"mult<=1({shape},{short_iri(p)})",
    )


def compile(s: ShexSchema) -> tuple[Dependency, ...]:  # noqa: A001
    """The dependency set capturing ``s``, ordered by (shape, predicate, label)."""
    deps: list[tuple[tuple, Dependency]] = []
    for shape in s.shapes:
        for c in s.defs[shape]:
            key = (shape, c.predicate)
            deps.append((key + (0,), tc(shape, c.target, c.predicate)))
            if c.mult in (Multiplicity.ONE, Multiplicity.PLUS):
                deps.append((key + (1,), mult_ge1(shape, c.predicate, c.target)))
            if c.mult in (Multiplicity.ONE, Multiplicity.OPT):
                deps.append((key + (2,), mult_le1(shape, c.predicate)))
    deps.sort(key=lambda kd: kd[0])
    return tuple(d for _, d in deps)


def format_dependency(dep: Dependency) -> str:
    def term(t) -> str:
        return short_iri(t) if isinstance(t, Value) else str(t)

    def atom(a: Atom) -> str:
        return f"{a.relation}({', '.join(term(t) for t in a.terms)})"

    body = ", ".join(atom(a) for a in dep.body)
    if dep.kind == "egd":
        x, y = dep.equality  # type: ignore[misc]
        rhs = f"{x} = {y}"
    else:
        rhs = ", ".join(atom(a) for a in dep.head)
        if dep.existentials:
            rhs = f"exists {', '.join(map(str, dep.existentials))}. {rhs}"
    return f"[{dep.label}] {body} => {rhs}"


@dataclass(frozen=True)
class Entailment:
    """Outcome of ``satisfies``; falsy with a witness when some dependency fails."""

    ok: bool
    dependency: Dependency | None = None
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def head_satisfied(store: FactStore, dep: Dependency, h: dict, reg: ConstructorRegistry | None) -> bool:
    if not dep.existentials:
        return all(
            (a.relation, tuple(evaluate(t, h, reg) for t in a.terms)) in store
            for a in dep.head
        )
    head = [partially_ground(a, h, reg) for a in dep.head]
    return store.holds(head, h)


def satisfies(
    inst: Instance | FactStore,
    deps: Iterable[Dependency],
    reg: ConstructorRegistry | None = None,
) -> Entailment:
    """First-order entailment of tgds and egds by a finite instance.

    Existential witnesses are searched in the active domain, which suffices
    since heads are relational atoms over the same instance.
    """
    store = inst if isinstance(inst, FactStore) else FactStore.of(inst)
    for dep in deps:
        for h in store.match(dep.body):
            if dep.kind == "egd":
                x, y = dep.equality  # type: ignore[misc]
                if h[x] != h[y]:
                    return Entailment(False, dep, h)
            elif not head_satisfied(store, dep, h, reg):
                return Entailment(False, dep, h)
    return Entailment(True)


# --------------------------------------------------------------------------
# Dependency graph and weak recursion


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str, str]]  # (from, to, "strong" | "weak")

    def strong_subgraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from((a, b) for a, b, k in self.edges if k == "strong")
        return g


def dependency_graph(s: ShexSchema) -> DependencyGraph:
    edges = set()
    for shape in s.shapes:
        for c in s.defs[shape]:
            if c.target == LIT:
                continue
            strong = c.mult in (Multiplicity.ONE, Multiplicity.PLUS)
            edges.add((shape, c.target, "strong" if strong else "weak"))
    return DependencyGraph(tuple(s.shapes), frozenset(edges))


@dataclass(frozen=True)
class Recursion:
    weakly_recursive: bool
    strong_cycle: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.weakly_recursive


def is_weakly_recursive(s: ShexSchema) -> Recursion:
    """True unless some cycle of the dependency graph uses strong edges only."""
    g = dependency_graph(s).strong_subgraph()
    try:
        cycle = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return Recursion(True)
    return Recursion(False, tuple(u for u, _ in cycle))
