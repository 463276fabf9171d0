"""Key-coveredness of fully-typed settings.

Two st-tgds that write the same subject constructor and predicate under a
``1`` or ``?`` multiplicity must be forced by the source fds to agree on their
objects.  Whether they are is decided by freezing both bodies into a tableau
and chasing it with the fds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .core import Instance, Multiplicity, RelationalSchema, ShexSchema, Value, lit
from .logic import Atom, FnTerm, Var, atoms_variables
from .mapping import NormalizedStTgd, Setting


@dataclass(frozen=True)
class ContentiousPair:
    first: NormalizedStTgd
    second: NormalizedStTgd
    constructor: str
    predicate: Value
    subject_type: str
    object_type: str
    mult: Multiplicity
    indices: tuple[int, int] = (0, 0)


def contentious_pairs(rules: Sequence[NormalizedStTgd], s: ShexSchema) -> list[ContentiousPair]:
    """All unordered pairs, self-pairs included, ordered by rule index."""
    out = []
    for i, r1 in enumerate(rules):
        c = s.constraint(r1.subject_type, r1.predicate)
        if c is None or c.mult not in (Multiplicity.ONE, Multiplicity.OPT):
            continue
        for j in range(i, len(rules)):
            r2 = rules[j]
            if r2.subject.symbol == r1.subject.symbol and r2.predicate == r1.predicate:
                out.append(
                    ContentiousPair(
                        r1, r2, r1.subject.symbol, r1.predicate,
                        r1.subject_type, r1.object_type, c.mult, (i, j),
                    )
                )
    return out


Cell = Union[Var, Value]


class _UnionFind:
    """Union-find over variables and constants; a constant always represents its class."""

    def __init__(self) -> None:
        self.parent: dict[Cell, Cell] = {}

    def find(self, c: Cell) -> Cell:
        root = c
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while c != root:
            nxt = self.parent.get(c, c)
            self.parent[c] = root
            c = nxt
        return root

    def union(self, a: Cell, b: Cell) -> bool:
        """Merge the classes of ``a`` and ``b``; False when two constants clash."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        if isinstance(ra, Value) and isinstance(rb, Value):
            return False
        if isinstance(rb, Value) or (isinstance(ra, Var) and isinstance(rb, Var) and rb < ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _rename(rule: NormalizedStTgd, tag: str) -> NormalizedStTgd:
    def r(t):
        if isinstance(t, Var):
            return Var(f"{t.name}_{tag}")
        if isinstance(t, FnTerm):
            return FnTerm(t.symbol, tuple(r(a) for a in t.args))
        return t

    return NormalizedStTgd(
        tuple(Atom(a.relation, tuple(r(t) for t in a.terms)) for a in rule.body),
        r(rule.subject), rule.subject_type, rule.predicate,
        r(rule.object), rule.object_type, rule.origin,
    )


@dataclass(frozen=True)
class _Identified:
    """Both rules renamed apart with their subject arguments unified."""

    first: NormalizedStTgd
    second: NormalizedStTgd
    uf: _UnionFind
    clash: bool


def _identify(pair: ContentiousPair) -> _Identified:
    r1, r2 = _rename(pair.first, "1"), _rename(pair.second, "2")
    uf = _UnionFind()
    clash = False
    for a, b in zip(r1.subject.args, r2.subject.args):
        clash |= not uf.union(a, b)
    return _Identified(r1, r2, uf, clash)


def _object_cells(rule: NormalizedStTgd) -> tuple[Cell, ...]:
    if isinstance(rule.object, Var):
        return (rule.object,)
    return tuple(rule.object.args)


@dataclass(frozen=True)
class ConjunctiveQuery:
    head: tuple[Cell, ...]
    body: tuple[Atom, ...]

    @property
    def existentials(self) -> list[Var]:
        return [v for v in atoms_variables(self.body) if v not in self.head]

    def __str__(self) -> str:
        ex = self.existentials
        q = ", ".join(map(str, self.body))
        if ex:
            q = f"exists {', '.join(map(str, ex))}. {q}"
        return f"V({', '.join(map(str, self.head))}) <- {q}"


@dataclass(frozen=True)
class ViewFd:
    """A union of two conjunctive queries and the fd {1..m} -> {m+1..m+n}."""

    queries: tuple[ConjunctiveQuery, ConjunctiveQuery]
    m: int
    n: int

    @property
    def lhs(self) -> frozenset[int]:
        return frozenset(range(1, self.m + 1))

    @property
    def rhs(self) -> frozenset[int]:
        return frozenset(range(self.m + 1, self.m + self.n + 1))


class InvariantError(AssertionError):
    pass


def _substitute_atoms(atoms: Sequence[Atom], uf: _UnionFind) -> tuple[Atom, ...]:
    return tuple(
        Atom(a.relation, tuple(uf.find(t) if isinstance(t, (Var, Value)) else t for t in a.terms))
        for a in atoms
    )


def build_view_fd(pair: ContentiousPair) -> ViewFd:
    ident = _identify(pair)
    r1, r2, uf = ident.first, ident.second, ident.uf
    if isinstance(r1.object, FnTerm) != isinstance(r2.object, FnTerm) or (
        isinstance(r1.object, FnTerm) and r1.object.symbol != r2.object.symbol  # type: ignore[union-attr]
    ):
        raise InvariantError(f"contentious rules with differently built objects: {r1.object} vs {r2.object}")
    x = tuple(uf.find(a) for a in r1.subject.args)
    z1 = tuple(uf.find(c) for c in _object_cells(r1))
    z2 = tuple(uf.find(c) for c in _object_cells(r2))
    q1 = ConjunctiveQuery(x + z1, _substitute_atoms(r1.body, uf))
    q2 = ConjunctiveQuery(x + z2, _substitute_atoms(r2.body, uf))
    return ViewFd((q1, q2), len(x), len(z1))


@dataclass(frozen=True)
class Overlap:
    """Verdict of the overlap test; a counterexample instance accompanies False."""

    ok: bool
    counterexample: Instance | None = None

    def __bool__(self) -> bool:
        return self.ok


def _chase_tableau(facts: list[tuple[str, tuple[Cell, ...]]], schema: RelationalSchema, uf: _UnionFind) -> bool:
    """Apply the fds as egds until fixpoint; False if two constants are equated."""
    changed = True
    while changed:
        changed = False
        for fd in schema.fds:
            groups: dict[tuple, tuple[Cell, ...]] = {}
            for rel, tup in facts:
                if rel != fd.relation:
                    continue
                key = tuple(uf.find(tup[i - 1]) for i in sorted(fd.lhs))
                prev = groups.setdefault(key, tup)
                if prev is tup:
                    continue
                for j in sorted(fd.rhs):
                    a, b = uf.find(prev[j - 1]), uf.find(tup[j - 1])
                    if a != b:
                        if not uf.union(a, b):
                            return False
                        changed = True
    return True


def functionally_overlapping(pair: ContentiousPair, schema: RelationalSchema) -> Overlap:
    """Do the fds force equal objects whenever both rules fire on one subject?"""
    ident = _identify(pair)
    if ident.clash:
        # The subjects can never coincide.
        return Overlap(True)
    r1, r2, uf = ident.first, ident.second, ident.uf
    facts = [(a.relation, a.terms) for a in (*r1.body, *r2.body)]
    if not _chase_tableau(facts, schema, uf):
        # No valid instance satisfies both bodies with equal subjects.
        return Overlap(True)
    o1, o2 = _object_cells(r1), _object_cells(r2)
    if len(o1) != len(o2):
        raise InvariantError("object vectors of different lengths")
    if all(uf.find(a) == uf.find(b) for a, b in zip(o1, o2)):
        return Overlap(True)
    return Overlap(False, _realize(facts, uf))


def _realize(facts, uf: _UnionFind) -> Instance:
    """Turn the chased tableau into concrete facts, one fresh literal per class."""
    constants = {c.text for _, tup in facts for c in tup if isinstance(c, Value)}
    names: dict[Cell, Value] = {}

    def value(c: Cell) -> Value:
        root = uf.find(c)
        if isinstance(root, Value):
            return root
        if root not in names:
            text = root.name
            while text in constants:
                text += "'"
            constants.add(text)
            names[root] = lit(text)
        return names[root]

    return Instance.from_facts((rel, tuple(value(c) for c in tup)) for rel, tup in facts)


@dataclass(frozen=True)
class KeyCoverage:
    ok: bool
    pairs: tuple[ContentiousPair, ...] = ()
    witness: ContentiousPair | None = None
    counterexample: Instance | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_key_covered(setting: Setting) -> KeyCoverage:
    pairs = tuple(contentious_pairs(setting.rules, setting.target))
    for pair in pairs:
        verdict = functionally_overlapping(pair, setting.source)
        if not verdict:
            return KeyCoverage(False, pairs, pair, verdict.counterexample)
    return KeyCoverage(True, pairs)
