"""Project files: CSV instances, constructor tables, N-Triples and typing TSV."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    NULL_PREFIX, Instance, Kind, RelationalSchema, SchemaError, ShexSchema, TypedGraph, Value,
    blank, iri, lit,
)
from .mapping import ConstructorRegistry, NormalizedStTgd, Setting, StTgd, normalize, registry_for
from .syntax import parse_mapping, parse_relational_schema, parse_shex


class InputError(ValueError):
    pass


# --------------------------------------------------------------------------
# Source instances


def load_instance(directory: str | Path, schema: RelationalSchema) -> Instance:
    """Read ``<Rel>.csv`` files (headerless, every cell a literal)."""
    d = Path(directory)
    facts = []
    for path in sorted(d.glob("*.csv")):
        rel = path.stem
        if rel not in schema.relations:
            raise InputError(f"{path.name}: no relation {rel} in the schema")
        n = schema.arity(rel)
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row:
                    continue
                if len(row) != n:
                    raise InputError(f"{path.name}:{lineno}: {len(row)} cells, {rel} has arity {n}")
                for cell in row:
                    if cell.startswith(NULL_PREFIX):
                        raise InputError(f"{path.name}:{lineno}: cell {cell!r} uses the reserved null prefix")
                facts.append((rel, tuple(lit(c) for c in row)))
    return Instance.from_facts(facts)


def write_instance(inst: Instance, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for rel in sorted({r for r, _ in inst}):
        with (d / f"{rel}.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for tup in sorted(inst.relation(rel)):
                w.writerow([v.text for v in tup])


# --------------------------------------------------------------------------
# Constructor tables


def load_constructor_tables(directory: str | Path) -> dict[str, dict[tuple[Value, ...], Value]]:
    """``<symbol>.tsv``: argument columns followed by the IRI (``<...>`` optional)."""
    d = Path(directory)
    tables: dict[str, dict[tuple[Value, ...], Value]] = {}
    if not d.is_dir():
        return tables
    for path in sorted(d.glob("*.tsv")):
        table: dict[tuple[Value, ...], Value] = {}
        width = None
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
                if not row or row[0].startswith("#"):
                    continue
                if width is None:
                    width = len(row)
                if len(row) != width or width < 2:
                    raise InputError(f"{path.name}:{lineno}: ragged or too narrow row")
                out = row[-1]
                if out.startswith("<") and out.endswith(">"):
                    out = out[1:-1]
                key = tuple(lit(c) for c in row[:-1])
                if key in table:
                    raise InputError(f"{path.name}:{lineno}: arguments {row[:-1]} listed twice")
                table[key] = iri(out)
        tables[path.stem] = table
    return tables


# --------------------------------------------------------------------------
# N-Triples and typing


_NT_TERM = re.compile(r'\s*(<[^<>"\s]*>|_:[A-Za-z0-9_][\w\-.]*|"(?:[^"\\]|\\.)*")')
_UNESC = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}


def _lines(text: str) -> list[str]:
    # str.splitlines also breaks on characters that may sit inside a literal.
    return [line.removesuffix("\r") for line in text.split("\n")]


def parse_term(s: str) -> Value:
    s = s.strip()
    m = _NT_TERM.fullmatch(s)
    if m is None:
        raise InputError(f"not an N-Triples term: {s!r}")
    return _term(m.group(1))


def _term(tok: str) -> Value:
    if tok.startswith("<"):
        return iri(tok[1:-1])
    if tok.startswith("_:"):
        return blank(tok[2:])
    return Value(Kind.LIT, re.sub(r"\\(.)", lambda m: _UNESC.get(m.group(1), m.group(1)), tok[1:-1]))


def parse_ntriples(text: str) -> set[tuple[Value, Value, Value]]:
    out = set()
    for lineno, line in enumerate(_lines(text), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        pos, terms = 0, []
        for _ in range(3):
            m = _NT_TERM.match(line, pos)
            if m is None:
                raise InputError(f"line {lineno}: malformed triple")
            terms.append(_term(m.group(1)))
            pos = m.end()
        if line[pos:].strip() != ".":
            raise InputError(f"line {lineno}: expected '.' after the object")
        out.add(tuple(terms))
    return out  # type: ignore[return-value]


def format_ntriples(triples) -> str:
    return "".join(f"{s} {p} {o} .\n" for s, p, o in sorted(triples))


def format_typing(g: TypedGraph) -> str:
    rows = sorted((n, t) for n, ts in g.typing.items() for t in ts)
    return "".join(f"{n}\t{t}\n" for n, t in rows)


def parse_typing(text: str) -> dict[Value, frozenset[str]]:
    typing: dict[Value, set[str]] = {}
    for lineno, line in enumerate(_lines(text), 1):
        if not line.strip():
            continue
        node, sep, t = line.rpartition("\t")
        if not sep or not t.strip():
            raise InputError(f"typing line {lineno}: expected node TAB type")
        typing.setdefault(parse_term(node), set()).add(t.strip())
    return {n: frozenset(ts) for n, ts in typing.items()}


def emit_graph(g: TypedGraph, out_dir: str | Path) -> tuple[Path, Path]:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    nt, tsv = d / "solution.nt", d / "typing.tsv"
    nt.write_text(format_ntriples(g.triples), encoding="utf-8")
    tsv.write_text(format_typing(g), encoding="utf-8")
    return nt, tsv


def read_graph(nt_path: str | Path, typing_path: str | Path) -> TypedGraph:
    triples = parse_ntriples(Path(nt_path).read_text(encoding="utf-8"))
    typing = parse_typing(Path(typing_path).read_text(encoding="utf-8"))
    try:
        return TypedGraph(frozenset(triples), typing)
    except SchemaError as e:
        raise InputError(str(e)) from None


# --------------------------------------------------------------------------
# Projects


@dataclass(frozen=True)
class Project:
    """A project directory: schema.rel, schema.shex, mapping.st, constructors/, instance/."""

    root: Path
    source: RelationalSchema
    target: ShexSchema
    rules: tuple[StTgd, ...]
    tables: dict = field(default_factory=dict)

    @classmethod
    def load(cls, root: str | Path) -> Project:
        r = Path(root)
        for name in ("schema.rel", "schema.shex", "mapping.st"):
            if not (r / name).is_file():
                raise InputError(f"{r}: missing {name}")
        source = parse_relational_schema((r / "schema.rel").read_text(encoding="utf-8"))
        target = parse_shex((r / "schema.shex").read_text(encoding="utf-8"))
        rules = parse_mapping((r / "mapping.st").read_text(encoding="utf-8"), source, target)
        tables = load_constructor_tables(r / "constructors")
        return cls(r, source, target, tuple(rules), tables)

    def normalized(self) -> list[NormalizedStTgd]:
        return normalize(self.rules)

    def registry(self) -> ConstructorRegistry:
        reg = registry_for(self.rules)
        for sym, table in self.tables.items():
            if sym not in reg.signature:
                raise InputError(f"constructor table for {sym}, which no rule uses")
            for args in table:
                if len(args) != reg.signature[sym]:
                    raise InputError(f"table {sym}.tsv has {len(args)} argument columns, {sym} takes {reg.signature[sym]}")
        return ConstructorRegistry(reg.signature, self.tables)

    def setting(self) -> Setting:
        return Setting(self.source, self.target, tuple(self.normalized()), self.registry())

    def instance(self, directory: str | Path | None = None) -> Instance:
        d = Path(directory) if directory is not None else self.root / "instance"
        if not d.is_dir():
            raise InputError(f"{d}: no instance directory")
        return load_instance(d, self.source)
