"""Surface syntax for relational schemas, ShEx schemas and st-tgd mappings.

Each DSL has a parser and a printer whose output re-parses to an equal value.
Predicates written ``:name`` expand to the default ``urn:dx:p:`` namespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    LIT, TRIPLE, FunctionalDependency, Kind, Multiplicity, RelationalSchema, SchemaError,
    ShexSchema, TripleConstraint, Value, iri, lit,
)
from .logic import Atom, DependencyError, FnTerm, Term, Var
from .mapping import StTgd
from .shex2dep import DEFAULT_PREFIX


class ParseError(SchemaError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>\s"]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>=>|->)
  | (?P<dcolon>::)
  | (?P<pname>:[A-Za-z_][\w\-]*)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<punct>[(){};,:\[\]?*+])
    """,
    re.VERBOSE,
)

_PNAME_LOCAL = re.compile(r"^[A-Za-z_][\w\-]*$")
_IDENT = re.compile(r"^[A-Za-z_]\w*$")
_UNESCAPE = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int


def tokenize(text: str) -> list[Token]:
    out, pos, line = [], 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line))  # type: ignore[arg-type]
        line += m.group().count("\n")
        pos = m.end()
    return out


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: _UNESCAPE.get(m.group(1), m.group(1)), s[1:-1])


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def line(self) -> int | None:
        if self.i < len(self.toks):
            return self.toks[self.i].line
        return self.toks[-1].line if self.toks else None

    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.line)
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line)
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected {what}, found {t.text!r}", t.line)
        return t

    def colon(self) -> None:
        """Accept ``:`` even when the lexer glued it to the next name."""
        t = self.peek()
        if t is not None and t.kind == "pname":
            self.toks[self.i] = Token("ident", t.text[1:], t.line)
            return
        self.expect(":")

    def error(self, message: str, line: int | None = None) -> ParseError:
        return ParseError(message, line if line is not None else self.line)


def _predicate(tok: Token) -> Value:
    if tok.kind == "pname":
        return iri(DEFAULT_PREFIX + tok.text[1:])
    if tok.kind == "iri":
        return iri(tok.text[1:-1])
    raise ParseError(f"expected a predicate, found {tok.text!r}", tok.line)


def format_iri(v: Value) -> str:
    if v.text.startswith(DEFAULT_PREFIX) and _PNAME_LOCAL.match(v.text[len(DEFAULT_PREFIX):]):
        return ":" + v.text[len(DEFAULT_PREFIX):]
    return f"<{v.text}>"


# --------------------------------------------------------------------------
# Relational schemas


def parse_relational_schema(text: str) -> RelationalSchema:
    p = _Parser(text)
    rels: dict[str, tuple[str, ...]] = {}
    fds: list[FunctionalDependency] = []

    def attrs(rel: Token, stop: str) -> frozenset[int]:
        names = rels[rel.text]
        out = set()
        while not p.at(stop):
            a = p.ident("attribute name")
            if a.text not in names:
                raise p.error(f"{rel.text} has no attribute {a.text}", a.line)
            out.add(names.index(a.text) + 1)
        if not out:
            raise p.error("empty attribute list")
        return frozenset(out)

    while not p.done():
        head = p.ident("relation or directive")
        nxt = p.peek()
        if head.text in ("fd", "key") and nxt is not None and nxt.kind in ("ident", "pname") and not (
            nxt.kind == "ident" and p.peek(1) is not None and p.peek(1).text == "("  # type: ignore[union-attr]
        ):
            rel = p.ident("relation name")
            if rel.text not in rels:
                raise p.error(f"unknown relation {rel.text}", rel.line)
            p.colon()
            if head.text == "key":
                lhs = attrs(rel, ";")
                rhs = frozenset(range(1, len(rels[rel.text]) + 1))
            else:
                lhs = attrs(rel, "->")
                p.expect("->")
                rhs = attrs(rel, ";")
            p.expect(";")
            fds.append(FunctionalDependency(rel.text, lhs, rhs))
            continue
        if head.text in rels:
            raise p.error(f"duplicate declaration of {head.text}", head.line)
        p.expect("(")
        names: list[str] = []
        while not p.at(")"):
            if names:
                p.expect(",")
            a = p.ident("attribute name")
            if a.text in names:
                raise p.error(f"duplicate attribute {a.text} in {head.text}", a.line)
            names.append(a.text)
        p.expect(")")
        p.expect(";")
        rels[head.text] = tuple(names)
    return RelationalSchema(rels, tuple(fds))


def format_relational_schema(schema: RelationalSchema) -> str:
    lines = [f"{r}({', '.join(a)});" for r, a in schema.relations.items()]
    for fd in schema.fds:
        names = schema.relations[fd.relation]
        lhs = " ".join(names[i - 1] for i in sorted(fd.lhs))
        rhs = " ".join(names[i - 1] for i in sorted(fd.rhs))
        lines.append(f"fd {fd.relation}: {lhs} -> {rhs};")
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------------------
# ShEx schemas


_MULT = {"1": Multiplicity.ONE, "?": Multiplicity.OPT, "*": Multiplicity.STAR, "+": Multiplicity.PLUS}


def parse_shex(text: str) -> ShexSchema:
    p = _Parser(text)
    defs: dict[str, list[TripleConstraint]] = {}
    refs: list[tuple[str, int]] = []
    while not p.done():
        name = p.ident("shape name")
        if name.text in defs:
            raise p.error(f"duplicate shape {name.text}", name.line)
        if name.text in (TRIPLE, LIT):
            raise p.error(f"{name.text} is reserved", name.line)
        p.expect("{")
        cs: list[TripleConstraint] = []
        while not p.at("}"):
            ptok = p.next()
            pred = _predicate(ptok)
            if any(c.predicate == pred for c in cs):
                raise p.error(f"duplicate predicate {ptok.text} in {name.text}", ptok.line)
            p.expect("::")
            target = p.ident("shape name or Lit")
            mult = Multiplicity.ONE
            if p.at("["):
                p.next()
                m = p.next()
                if m.text not in _MULT:
                    raise p.error(f"bad multiplicity {m.text!r}", m.line)
                mult = _MULT[m.text]
                p.expect("]")
            if target.text != LIT:
                refs.append((target.text, target.line))
            cs.append(TripleConstraint(pred, target.text, mult))
            if not p.at("}"):
                p.expect(";")
        p.expect("}")
        defs[name.text] = cs
    for ref, line in refs:
        if ref not in defs:
            raise ParseError(f"unknown shape {ref}", line)
    return ShexSchema({k: tuple(v) for k, v in defs.items()})


def format_shex(s: ShexSchema) -> str:
    out = []
    for shape in s.shapes:
        body = "".join(f"  {format_iri(c.predicate)} :: {c.target} [{c.mult.value}];\n" for c in s.defs[shape])
        out.append(f"{shape} {{\n{body}}}\n")
    return "".join(out)


# --------------------------------------------------------------------------
# Mappings


def _term(p: _Parser, in_head: bool, nested: bool = False) -> Term:
    t = p.next()
    if t.kind == "ident":
        if p.at("("):
            if not in_head:
                raise p.error(f"function term {t.text}(...) in a rule body", t.line)
            if nested:
                raise p.error(f"nested function term {t.text}(...)", t.line)
            p.next()
            args = []
            while not p.at(")"):
                if args:
                    p.expect(",")
                args.append(_term(p, in_head, nested=True))
            p.expect(")")
            return FnTerm(t.text, tuple(args))  # type: ignore[arg-type]
        return Var(t.text)
    if t.kind == "string":
        return lit(_unquote(t.text))
    if t.kind == "number":
        return lit(t.text)
    if t.kind in ("pname", "iri"):
        return _predicate(t)
    raise p.error(f"unexpected {t.text!r} in term position", t.line)


def _atoms(p: _Parser, in_head: bool, stop: str) -> list[Atom]:
    atoms = []
    while True:
        rel = p.ident("relation name")
        p.expect("(")
        terms: list[Term] = []
        while not p.at(")"):
            if terms:
                p.expect(",")
            terms.append(_term(p, in_head))
        p.expect(")")
        atoms.append(Atom(rel.text, tuple(terms)))
        if p.at(stop):
            return atoms
        p.expect(",")


def parse_mapping(
    text: str, source: RelationalSchema | None = None, target: ShexSchema | None = None
) -> list[StTgd]:
    """Parse ``body => head;`` rules, checking relation names when schemas are given."""
    p = _Parser(text)
    rules = []
    while not p.done():
        line = p.line
        body = _atoms(p, False, "=>")
        p.expect("=>")
        head = _atoms(p, True, ";")
        p.expect(";")
        if source is not None:
            for a in body:
                if a.relation not in source.relations:
                    raise ParseError(f"unknown source relation {a.relation}", line)
                if len(a.terms) != source.arity(a.relation):
                    raise ParseError(f"{a} does not match the arity of {a.relation}", line)
        if target is not None:
            for a in head:
                want = 3 if a.relation == TRIPLE else 1
                if a.relation not in (TRIPLE, LIT) and a.relation not in target.defs:
                    raise ParseError(f"unknown target relation {a.relation}", line)
                if len(a.terms) != want:
                    raise ParseError(f"{a} needs {want} argument(s)", line)
        try:
            rules.append(StTgd(tuple(body), tuple(head)))
        except DependencyError as e:
            raise ParseError(str(e), line) from None
    return rules


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, FnTerm):
        return f"{t.symbol}({', '.join(format_term(a) for a in t.args)})"
    if t.kind is Kind.IRI:
        return format_iri(t)
    if t.kind is Kind.LIT:
        return str(t)
    raise ValueError(f"blank node {t} has no surface syntax")


def format_atoms(atoms: Iterable[Atom]) -> str:
    return ", ".join(f"{a.relation}({', '.join(format_term(t) for t in a.terms)})" for a in atoms)


def format_mapping(rules: Sequence[StTgd]) -> str:
    return "".join(f"{format_atoms(r.body)} => {format_atoms(r.head)};\n" for r in rules)


def is_identifier(s: str) -> bool:
    return bool(_IDENT.match(s))
