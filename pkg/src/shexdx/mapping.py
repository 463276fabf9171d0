"""Data exchange settings: IRI constructors, st-tgds, normalization, typing checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union
from urllib.parse import quote

from .core import LIT, TRIPLE, Kind, RelationalSchema, SchemaError, ShexSchema, Value, iri
from .logic import Atom, ConfigurationError, Dependency, FnTerm, Var, atoms_variables
from .shex2dep import compile as compile_shex
from .shex2dep import short_iri

DEFAULT_NAMESPACE = "urn:dx:"

_KIND_TAG = {Kind.IRI: "I", Kind.LIT: "L", Kind.BLANK: "B"}


def _enc(v: Value) -> str:
    return _KIND_TAG[v.kind] + quote(v.text, safe="")


def default_interpretation(symbol: str, args: Sequence[Value], arity: int | None = None) -> Value:
    """Deterministic injective IRI for ``symbol(args)``.

    Distinct symbols land in distinct ``urn:dx:<symbol>:`` namespaces, and the
    per-argument encoding escapes ``/`` so argument boundaries stay unambiguous.
    """
    if arity is not None and len(args) != arity:
        raise ValueError(f"{symbol} expects {arity} arguments, got {len(args)}")
    return iri(f"{DEFAULT_NAMESPACE}{quote(symbol, safe='')}:" + "/".join(map(_enc, args)))


@dataclass(frozen=True)
class ConstructorRegistry:
    """Function signature plus interpretation.

    Explicit tables take precedence; unlisted arguments fall back to
    ``default_interpretation``.  Tables are checked for injectivity and for
    disjointness across symbols at construction.
    """

    signature: Mapping[str, int] = field(default_factory=dict)
    tables: Mapping[str, Mapping[tuple[Value, ...], Value]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "signature", dict(self.signature))
        object.__setattr__(self, "tables", {f: dict(t) for f, t in self.tables.items()})
        owner: dict[Value, str] = {}
        for f, table in self.tables.items():
            if f not in self.signature:
                raise SchemaError(f"table given for unknown constructor {f}")
            for args, out in table.items():
                if len(args) != self.signature[f]:
                    raise SchemaError(f"table entry {args} of {f} has the wrong arity")
                if out.kind is not Kind.IRI:
                    raise SchemaError(f"{f}{args} maps to non-IRI {out}")
                if out.text.startswith(DEFAULT_NAMESPACE):
                    raise SchemaError(f"{out} lies in the reserved namespace {DEFAULT_NAMESPACE}")
                if out in owner:
                    raise SchemaError(f"{out} is produced twice (by {owner[out]} and {f})")
                owner[out] = f

    def interpret(self, symbol: str, args: Sequence[Value]) -> Value:
        if symbol not in self.signature:
            raise ConfigurationError(f"unknown constructor {symbol}")
        args = tuple(args)
        if len(args) != self.signature[symbol]:
            raise ConfigurationError(
                f"{symbol} expects {self.signature[symbol]} arguments, got {len(args)}"
            )
        hit = self.tables.get(symbol, {}).get(args)
        return hit if hit is not None else default_interpretation(symbol, args)


class MappingError(ValueError):
    pass


class NotFullyTypedError(MappingError):
    def __init__(self, rule: int, atom: Atom | None, reason: str):
        self.rule, self.atom, self.reason = rule, atom, reason
        where = f" at {atom}" if atom is not None else ""
        super().__init__(f"rule {rule}{where}: {reason}")


@dataclass(frozen=True)
class StTgd:
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "head", tuple(self.head))
        # Dependency enforces: no function terms in bodies, no free head variables.
        self.to_dependency()

    def to_dependency(self, name: str = "") -> Dependency:
        return Dependency("tgd", self.body, self.head, label="st", name=name)

    def __str__(self) -> str:
        return f"{', '.join(map(str, self.body))} => {', '.join(map(str, self.head))}"


ObjectTerm = Union[Var, FnTerm]


@dataclass(frozen=True)
class NormalizedStTgd:
    """``body => Triple(s, p, o), T_s(s), T_o(o)`` with ``s`` a constructor term."""

    body: tuple[Atom, ...]
    subject: FnTerm
    subject_type: str
    predicate: Value
    object: ObjectTerm
    object_type: str
    origin: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", tuple(self.body))
        if isinstance(self.object, Var) != (self.object_type == LIT):
            raise MappingError(f"object {self.object} does not fit object type {self.object_type}")

    @property
    def head(self) -> tuple[Atom, ...]:
        return (
            Atom(TRIPLE, (self.subject, self.predicate, self.object)),
            Atom(self.subject_type, (self.subject,)),
            Atom(self.object_type, (self.object,)),
        )

    def to_dependency(self) -> Dependency:
        return Dependency("tgd", self.body, self.head, label="st", name=f"st#{self.origin}")

    def object_vars(self) -> tuple[Var, ...]:
        if isinstance(self.object, Var):
            return (self.object,)
        return tuple(a for a in self.object.args if isinstance(a, Var))

    def __str__(self) -> str:
        body = ", ".join(map(str, self.body))
        return (
            f"{body} => Triple({self.subject}, {short_iri(self.predicate)}, {self.object}), "
            f"{self.subject_type}({self.subject}), {self.object_type}({self.object})"
        )


def normalize(rules: Sequence[StTgd]) -> list[NormalizedStTgd]:
    """Split every rule into one rule per Triple atom, attaching type assertions."""
    out = []
    for i, rule in enumerate(rules):
        triples = [a for a in rule.head if a.relation == TRIPLE]
        types = [a for a in rule.head if a.relation != TRIPLE]
        for a in types:
            if len(a.terms) != 1:
                raise NotFullyTypedError(i, a, "head atom is neither a Triple nor a type assertion")
        used: set[Atom] = set()
        for t in triples:
            if len(t.terms) != 3:
                raise NotFullyTypedError(i, t, "Triple atom needs three terms")
            s, p, o = t.terms
            if not isinstance(s, FnTerm):
                raise NotFullyTypedError(i, t, "subject is not a constructor application")
            if not (isinstance(p, Value) and p.kind is Kind.IRI):
                raise NotFullyTypedError(i, t, "predicate is not an IRI")
            s_types = [a for a in types if a.terms[0] == s and a.relation != LIT]
            if len(s_types) != 1:
                reason = "subject has no type assertion" if not s_types else "subject has several type assertions"
                raise NotFullyTypedError(i, t, reason)
            o_types = [a for a in types if a.terms[0] == o]
            if len(o_types) != 1:
                reason = "object has no type assertion" if not o_types else "object has several type assertions"
                raise NotFullyTypedError(i, t, reason)
            o_type = o_types[0].relation
            if isinstance(o, Var):
                if o_type != LIT:
                    raise NotFullyTypedError(i, t, "variable object must be typed Lit")
            elif isinstance(o, FnTerm):
                if o_type == LIT:
                    raise NotFullyTypedError(i, t, "constructor object must carry a shape type")
            else:
                raise NotFullyTypedError(i, t, "object is a constant")
            used.update((s_types[0], o_types[0]))
            out.append(NormalizedStTgd(rule.body, s, s_types[0].relation, p, o, o_type, origin=i))
        stray = [a for a in types if a not in used]
        if stray:
            raise NotFullyTypedError(i, stray[0], "type assertion not attached to any triple")
    return out


@dataclass(frozen=True)
class TypingViolation:
    rule: int
    code: str  # "a" subject, "b" object, "c" schema consistency, "d" constructor typing
    message: str


@dataclass(frozen=True)
class FullyTypedReport:
    violations: tuple[TypingViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def check_fully_typed(
    rules: Sequence[NormalizedStTgd], s: ShexSchema, reg: ConstructorRegistry
) -> FullyTypedReport:
    out: list[TypingViolation] = []
    shape_of: dict[str, str] = {}

    def bind(i: int, term: FnTerm, shape: str) -> None:
        seen = shape_of.setdefault(term.symbol, shape)
        if seen != shape:
            out.append(TypingViolation(i, "d", f"constructor {term.symbol} used with {seen} and {shape}"))

    for i, r in enumerate(rules):
        f = r.subject
        if r.subject_type not in s.defs:
            out.append(TypingViolation(i, "a", f"subject type {r.subject_type} is not a shape"))
        if reg.signature.get(f.symbol) != len(f.args):
            out.append(TypingViolation(i, "a", f"constructor {f.symbol}/{len(f.args)} is not registered"))
        if r.object_type == LIT:
            if not isinstance(r.object, Var):
                out.append(TypingViolation(i, "b", "Lit-typed object is not a variable"))
        else:
            if not isinstance(r.object, FnTerm):
                out.append(TypingViolation(i, "b", f"{r.object_type}-typed object is not a constructor term"))
            elif reg.signature.get(r.object.symbol) != len(r.object.args):
                out.append(TypingViolation(i, "b", f"constructor {r.object.symbol}/{len(r.object.args)} is not registered"))
            if r.object_type not in s.defs:
                out.append(TypingViolation(i, "b", f"object type {r.object_type} is not a shape"))
        c = s.constraint(r.subject_type, r.predicate)
        if c is None or c.target != r.object_type:
            out.append(
                TypingViolation(
                    i, "c",
                    f"{short_iri(r.predicate)} :: {r.object_type} is not in the definition of {r.subject_type}",
                )
            )
        bind(i, f, r.subject_type)
        if isinstance(r.object, FnTerm):
            bind(i, r.object, r.object_type)
    return FullyTypedReport(tuple(out))


def registry_for(
    rules: Iterable[StTgd | NormalizedStTgd],
    tables: Mapping[str, Mapping[tuple[Value, ...], Value]] | None = None,
) -> ConstructorRegistry:
    """Collect constructor arities from rule heads."""
    sig: dict[str, int] = {}
    for r in rules:
        for a in r.head:
            for t in a.terms:
                if isinstance(t, FnTerm):
                    if sig.setdefault(t.symbol, len(t.args)) != len(t.args):
                        raise MappingError(f"constructor {t.symbol} used with two arities")
    return ConstructorRegistry(sig, tables or {})


@dataclass(frozen=True)
class Setting:
    """A relational to RDF data exchange setting with normalized st-tgds."""

    source: RelationalSchema
    target: ShexSchema
    rules: tuple[NormalizedStTgd, ...]
    registry: ConstructorRegistry

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        clash = set(self.source.relations) & ({TRIPLE, LIT} | set(self.target.defs))
        if clash:
            raise SchemaError(f"source relations clash with target symbols: {sorted(clash)}")

    def st_dependencies(self) -> tuple[Dependency, ...]:
        return tuple(r.to_dependency() for r in self.rules)

    def target_dependencies(self) -> tuple[Dependency, ...]:
        return compile_shex(self.target)

    def fully_typed(self) -> FullyTypedReport:
        return check_fully_typed(self.rules, self.target, self.registry)


def body_variables(rule: NormalizedStTgd) -> list[Var]:
    return atoms_variables(rule.body)
