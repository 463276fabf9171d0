"""Domain values, relational schemas and instances, ShEx schemas, typed graphs."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

NULL_PREFIX = "__null_"

# Relation symbols reserved by the graph signature {Triple} + shapes + {Lit}.
TRIPLE = "Triple"
LIT = "Lit"


class Kind(str, Enum):
    BLANK = "blank"
    IRI = "iri"
    LIT = "lit"


_ESCAPES = str.maketrans({"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"})


@dataclass(frozen=True, order=True, slots=True)
class Value:
    """An element of the domain: an IRI, a literal or a blank node.

    Null-ness is derived from the payload: every blank node is a null, and
    literals whose text starts with ``__null_`` are null literals.
    """

    kind: Kind
    text: str

    @property
    def is_null(self) -> bool:
        if self.kind is Kind.BLANK:
            return True
        return self.kind is Kind.LIT and self.text.startswith(NULL_PREFIX)

    def __str__(self) -> str:
        if self.kind is Kind.IRI:
            return f"<{self.text}>"
        if self.kind is Kind.BLANK:
            return f"_:{self.text}"
        return '"' + self.text.translate(_ESCAPES) + '"'

    def __repr__(self) -> str:
        return str(self)


def iri(text: str) -> Value:
    return Value(Kind.IRI, text)


def lit(text: object) -> Value:
    return Value(Kind.LIT, str(text))


def blank(label: str) -> Value:
    return Value(Kind.BLANK, label)


def null_lit(index: int) -> Value:
    return Value(Kind.LIT, f"{NULL_PREFIX}{index}")


class SchemaError(ValueError):
    """A schema, instance or graph violates a structural invariant."""


class ArityError(SchemaError):
    pass


# --------------------------------------------------------------------------
# Relational side


@dataclass(frozen=True, slots=True)
class FunctionalDependency:
    """``relation: lhs -> rhs`` over 1-based attribute positions."""

    relation: str
    lhs: frozenset[int]
    rhs: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lhs", frozenset(self.lhs))
        object.__setattr__(self, "rhs", frozenset(self.rhs))
        if not self.lhs or not self.rhs:
            raise SchemaError(f"fd on {self.relation} needs nonempty sides")
        if min(self.lhs | self.rhs) < 1:
            raise SchemaError(f"fd on {self.relation} uses a position below 1")

    def __str__(self) -> str:
        lhs = ",".join(map(str, sorted(self.lhs)))
        rhs = ",".join(map(str, sorted(self.rhs)))
        return f"{self.relation}:{{{lhs}}}->{{{rhs}}}"


@dataclass(frozen=True)
class RelationalSchema:
    """Relation symbols with attribute names, plus positional fds."""

    relations: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    fds: tuple[FunctionalDependency, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "relations", {r: tuple(a) for r, a in self.relations.items()}
        )
        object.__setattr__(self, "fds", tuple(self.fds))
        for fd in self.fds:
            if fd.relation not in self.relations:
                raise SchemaError(f"fd references undeclared relation {fd.relation}")
            n = len(self.relations[fd.relation])
            if max(fd.lhs | fd.rhs) > n:
                raise SchemaError(f"fd {fd} exceeds arity {n}")

    @classmethod
    def from_arities(
        cls, arities: Mapping[str, int], fds: Iterable[FunctionalDependency] = ()
    ) -> RelationalSchema:
        rels = {r: tuple(f"a{i}" for i in range(1, n + 1)) for r, n in arities.items()}
        return cls(rels, tuple(fds))

    def arity(self, relation: str) -> int:
        return len(self.relations[relation])

    def fds_of(self, relation: str) -> list[FunctionalDependency]:
        return [fd for fd in self.fds if fd.relation == relation]


Fact = tuple[str, tuple[Value, ...]]


@dataclass(frozen=True)
class Instance:
    """A finite set of facts, grouped by relation symbol.

    Empty relations are dropped so that equality is equality of fact sets.
    """

    facts: Mapping[str, frozenset[tuple[Value, ...]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "facts",
            {r: frozenset(ts) for r, ts in sorted(self.facts.items()) if ts},
        )

    @classmethod
    def from_facts(cls, facts: Iterable[Fact]) -> Instance:
        grouped: dict[str, set[tuple[Value, ...]]] = defaultdict(set)
        for rel, tup in facts:
            grouped[rel].add(tuple(tup))
        return cls(grouped)

    def __iter__(self) -> Iterator[Fact]:
        for rel in sorted(self.facts):
            for tup in sorted(self.facts[rel]):
                yield rel, tup

    def __len__(self) -> int:
        return sum(len(ts) for ts in self.facts.values())

    def __contains__(self, fact: object) -> bool:
        rel, tup = fact  # type: ignore[misc]
        return tuple(tup) in self.facts.get(rel, frozenset())

    def relation(self, rel: str) -> frozenset[tuple[Value, ...]]:
        return self.facts.get(rel, frozenset())

    def dom(self) -> set[Value]:
        return {v for ts in self.facts.values() for t in ts for v in t}

    def union(self, other: Instance) -> Instance:
        return Instance.from_facts([*self, *other])

    def restrict(self, relations: Iterable[str]) -> Instance:
        keep = set(relations)
        return Instance({r: ts for r, ts in self.facts.items() if r in keep})

    def without(self, relations: Iterable[str]) -> Instance:
        drop = set(relations)
        return Instance({r: ts for r, ts in self.facts.items() if r not in drop})


def check_arities(inst: Instance, schema: RelationalSchema) -> None:
    for rel, tup in inst:
        if rel not in schema.relations:
            raise ArityError(f"relation {rel} is not declared")
        if len(tup) != schema.arity(rel):
            raise ArityError(
                f"tuple {tup} of {rel} has width {len(tup)}, expected {schema.arity(rel)}"
            )


@dataclass(frozen=True)
class FdViolation:
    fd: FunctionalDependency
    first: tuple[Value, ...]
    second: tuple[Value, ...]


def check_fds(inst: Instance, schema: RelationalSchema) -> list[FdViolation]:
    """Pairs of tuples that agree on an fd's lhs but not on its rhs."""
    check_arities(inst, schema)
    out = []
    for fd in schema.fds:
        lhs = sorted(fd.lhs)
        rhs = sorted(fd.rhs)
        groups: dict[tuple, list] = defaultdict(list)
        for tup in sorted(inst.relation(fd.relation)):
            groups[tuple(tup[i - 1] for i in lhs)].append(tup)
        for tups in groups.values():
            for i, a in enumerate(tups):
                for b in tups[i + 1:]:
                    if any(a[j - 1] != b[j - 1] for j in rhs):
                        out.append(FdViolation(fd, a, b))
    return out


# --------------------------------------------------------------------------
# ShEx side


class Multiplicity(str, Enum):
    ONE = "1"
    OPT = "?"
    STAR = "*"
    PLUS = "+"

    @property
    def lower(self) -> int:
        return 1 if self in (Multiplicity.ONE, Multiplicity.PLUS) else 0

    @property
    def upper(self) -> int | None:
        return 1 if self in (Multiplicity.ONE, Multiplicity.OPT) else None

    def admits(self, count: int) -> bool:
        return count >= self.lower and (self.upper is None or count <= self.upper)


@dataclass(frozen=True, slots=True)
class TripleConstraint:
    """``predicate :: target^mult``; target is a shape name or ``Lit``."""

    predicate: Value
    target: str
    mult: Multiplicity


@dataclass(frozen=True)
class ShexSchema:
    defs: Mapping[str, tuple[TripleConstraint, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        defs = {t: tuple(cs) for t, cs in self.defs.items()}
        object.__setattr__(self, "defs", defs)
        for shape, cs in defs.items():
            if shape in (TRIPLE, LIT):
                raise SchemaError(f"{shape} is a reserved name")
            seen = set()
            for c in cs:
                if c.predicate.kind is not Kind.IRI:
                    raise SchemaError(f"predicate {c.predicate} of {shape} is not an IRI")
                if c.predicate in seen:
                    raise SchemaError(f"{shape} has two constraints on {c.predicate}")
                seen.add(c.predicate)
                if c.target != LIT and c.target not in defs:
                    raise SchemaError(f"{shape} references undeclared shape {c.target}")

    @property
    def shapes(self) -> list[str]:
        return sorted(self.defs)

    def constraint(self, shape: str, predicate: Value) -> TripleConstraint | None:
        for c in self.defs.get(shape, ()):
            if c.predicate == predicate:
                return c
        return None

    def predicates(self) -> list[Value]:
        return sorted({c.predicate for cs in self.defs.values() for c in cs})


@dataclass(frozen=True)
class TypedGraph:
    """An RDF graph with a node -> set-of-types assignment.

    Nodes missing from ``typing`` carry the empty set of types.
    """

    triples: frozenset[tuple[Value, Value, Value]] = frozenset()
    typing: Mapping[Value, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        triples = frozenset(tuple(t) for t in self.triples)
        typing = {n: frozenset(ts) for n, ts in self.typing.items() if ts}
        object.__setattr__(self, "triples", triples)
        object.__setattr__(self, "typing", dict(sorted(typing.items())))
        for s, p, o in triples:
            if s.kind is Kind.LIT:
                raise SchemaError(f"literal subject in triple {(s, p, o)}")
            if p.kind is not Kind.IRI:
                raise SchemaError(f"non-IRI predicate in triple {(s, p, o)}")
        stray = set(typing) - self.nodes()
        if stray:
            raise SchemaError(f"typed values that are not graph nodes: {sorted(stray)}")

    def nodes(self) -> set[Value]:
        return {s for s, _, _ in self.triples} | {o for _, _, o in self.triples}

    def types_of(self, node: Value) -> frozenset[str]:
        return self.typing.get(node, frozenset())

    def objects(self, subject: Value, predicate: Value) -> list[Value]:
        return sorted(o for s, p, o in self.triples if s == subject and p == predicate)


def rdf_to_inst(g: TypedGraph) -> Instance:
    facts: list[Fact] = [(TRIPLE, t) for t in g.triples]
    facts += [(t, (n,)) for n, ts in g.typing.items() for t in ts]
    return Instance.from_facts(facts)


def inst_to_rdf(inst: Instance) -> TypedGraph:
    """Read an instance over {Triple} + types + {Lit} back as a typed graph."""
    triples = inst.relation(TRIPLE)
    for s, p, o in sorted(triples):
        if s.kind is Kind.LIT or p.kind is not Kind.IRI:
            raise SchemaError(f"fact Triple{(s, p, o)} is not a well-formed triple")
    nodes = {s for s, _, _ in triples} | {o for _, _, o in triples}
    typing: dict[Value, set[str]] = defaultdict(set)
    for rel, tup in inst:
        if rel == TRIPLE:
            continue
        if len(tup) != 1:
            raise SchemaError(f"fact {rel}{tup} is neither a triple nor a type assertion")
        (n,) = tup
        if rel == LIT and n.kind is not Kind.LIT:
            raise SchemaError(f"fact Lit({n}) types a non-literal")
        if rel != LIT and n.kind is Kind.LIT:
            raise SchemaError(f"fact {rel}({n}) assigns a shape to a literal")
        if n not in nodes:
            raise SchemaError(f"fact {rel}({n}) types a value that is not a graph node")
        typing[n].add(rel)
    return TypedGraph(frozenset(triples), typing)


@dataclass(frozen=True)
class Validation:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_typed_graph(g: TypedGraph, s: ShexSchema) -> Validation:
    """Check correct typing directly against the shape definitions."""
    out: list[str] = []
    by_subject: dict[tuple[Value, Value], list[Value]] = defaultdict(list)
    for subj, pred, obj in g.triples:
        by_subject[subj, pred].append(obj)
    for n in sorted(g.nodes()):
        for t in sorted(g.types_of(n)):
            if t == LIT:
                if n.kind is not Kind.LIT:
                    out.append(f"{n} is typed Lit but is not a literal")
                continue
            if t not in s.defs:
                out.append(f"{n} is typed with undeclared shape {t}")
                continue
            if n.kind is Kind.LIT:
                out.append(f"{n} is a literal typed with shape {t}")
                continue
            for c in s.defs[t]:
                objs = by_subject.get((n, c.predicate), [])
                for m in sorted(objs):
                    if c.target not in g.types_of(m):
                        out.append(f"{n} {c.predicate} {m}: object lacks type {c.target} (from {t})")
                if not c.mult.admits(len(objs)):
                    out.append(
                        f"{n} has {len(objs)} {c.predicate} triples, {t} requires [{c.mult.value}]"
                    )
    return Validation(not out, tuple(out))
