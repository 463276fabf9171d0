"""Brute-force reference procedures used to cross-check the analyses.

Nothing here is clever: each function enumerates a finite space that the
corresponding decision procedure reasons about symbolically.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import networkx as nx

from .chase import canonical_completion, chase
from .consistency import ContentiousPair
from .core import (
    LIT, TRIPLE, Instance, Kind, RelationalSchema, ShexSchema, Value, check_fds, iri, lit,
)
from .logic import FactStore, FnTerm, Var, ground
from .mapping import NormalizedStTgd, Setting
from .shex2dep import compile as compile_shex
from .shex2dep import satisfies

# --------------------------------------------------------------------------
# Functional overlap by exhaustive valuation


def _rename(rule: NormalizedStTgd, tag: str) -> tuple[list, object, object]:
    def r(t):
        if isinstance(t, Var):
            return Var(f"{t.name}#{tag}")
        if isinstance(t, FnTerm):
            return FnTerm(t.symbol, tuple(r(a) for a in t.args))
        return t

    body = [(a.relation, tuple(r(t) for t in a.terms)) for a in rule.body]
    return body, r(rule.subject), r(rule.object)


def _valuations(variables: Sequence[Var], constants: Sequence[Value]) -> Iterator[dict[Var, Value]]:
    """Every map of variables to constants or fresh values, up to renaming of the fresh ones."""
    taken = {c.text for c in constants}
    fresh = []
    k = 0
    while len(fresh) < len(variables):
        k += 1
        if f"@{k}" not in taken:
            fresh.append(lit(f"@{k}"))

    def go(i: int, used: int, nu: dict) -> Iterator[dict]:
        if i == len(variables):
            yield dict(nu)
            return
        v = variables[i]
        for c in [*constants, *fresh[:used]]:
            nu[v] = c
            yield from go(i + 1, used, nu)
        nu[v] = fresh[used]
        yield from go(i + 1, used + 1, nu)
        del nu[v]

    yield from go(0, 0, {})


def brute_force_overlap(pair: ContentiousPair, schema: RelationalSchema) -> tuple[bool, Instance | None]:
    """Decide functional overlap by trying every valuation of both bodies.

    A counterexample, if any exists, restricts to the image of the two bodies,
    which has at most as many distinct values as the rules have variables plus
    body constants.  So it suffices to try every valuation into that many
    values, up to renaming of the values that are not body constants.
    """
    b1, s1, o1 = _rename(pair.first, "1")
    b2, s2, o2 = _rename(pair.second, "2")
    variables = atoms_variables_from_facts(b1 + b2)
    constants = sorted({t for _, tup in b1 + b2 for t in tup if isinstance(t, Value)})

    def img(t, nu):
        if isinstance(t, Var):
            return nu[t]
        if isinstance(t, FnTerm):
            return (t.symbol, tuple(img(a, nu) for a in t.args))
        return t

    for nu in _valuations(variables, constants):
        if img(s1, nu) != img(s2, nu):
            continue
        if img(o1, nu) == img(o2, nu):
            continue
        inst = Instance.from_facts((r, tuple(img(t, nu) for t in tup)) for r, tup in b1 + b2)
        if not check_fds(inst, schema):
            return False, inst
    return True, None


def atoms_variables_from_facts(facts) -> list[Var]:
    out: list[Var] = []
    for _, tup in facts:
        for t in tup:
            if isinstance(t, Var) and t not in out:
                out.append(t)
    return out


# --------------------------------------------------------------------------
# Source instances over a finite pool


def conflict_graph(schema: RelationalSchema, rel: str, pool: Sequence[str]) -> nx.Graph:
    g = nx.Graph()
    tuples = [tuple(lit(v) for v in t) for t in itertools.product(pool, repeat=schema.arity(rel))]
    g.add_nodes_from(tuples)
    fds = schema.fds_of(rel)
    for a, b in itertools.combinations(tuples, 2):
        for fd in fds:
            if all(a[i - 1] == b[i - 1] for i in fd.lhs) and any(a[j - 1] != b[j - 1] for j in fd.rhs):
                g.add_edge(a, b)
                break
    return g


def maximal_valid_relations(schema: RelationalSchema, rel: str, pool: Sequence[str]) -> list[frozenset]:
    """Maximal fd-consistent tuple sets of one relation: maximal cliques of the compatibility graph."""
    g = conflict_graph(schema, rel, pool)
    return sorted((frozenset(c) for c in nx.find_cliques(nx.complement(g))), key=sorted)


def count_maximal_valid_instances(schema: RelationalSchema, pool: Sequence[str]) -> int:
    n = 1
    for rel in schema.relations:
        n *= len(maximal_valid_relations(schema, rel, pool))
    return n


def _canonical(inst: Instance, pool: Sequence[str]) -> tuple:
    best = None
    for perm in itertools.permutations(pool):
        m = {lit(a): lit(b) for a, b in zip(pool, perm)}
        key = tuple(sorted((r, tuple(m[v] for v in t)) for r, t in inst))
        if best is None or key < best:
            best = key
    return best  # type: ignore[return-value]


def maximal_valid_instances(
    schema: RelationalSchema, pool: Sequence[str], symmetry: bool = True
) -> list[Instance]:
    """Every maximal valid instance over ``pool``, optionally one per value-permutation orbit.

    Fds only relate tuples of one relation, so maximal valid instances are
    exactly products of per-relation maximal sets.
    """
    per_rel = [
        [(rel, s) for s in maximal_valid_relations(schema, rel, pool)] for rel in schema.relations
    ]
    out, seen = [], set()
    for combo in itertools.product(*per_rel):
        inst = Instance({rel: s for rel, s in combo})
        if symmetry:
            key = _canonical(inst, pool)
            if key in seen:
                continue
            seen.add(key)
        out.append(inst)
    return out


def all_valid_instances(schema: RelationalSchema, pool: Sequence[str]) -> Iterator[Instance]:
    """Literal enumeration of every valid instance; only feasible for tiny schemas."""
    facts = [
        (rel, tuple(lit(v) for v in t))
        for rel in schema.relations
        for t in itertools.product(pool, repeat=schema.arity(rel))
    ]
    for mask in range(1 << len(facts)):
        inst = Instance.from_facts(f for i, f in enumerate(facts) if mask >> i & 1)
        if not check_fds(inst, schema):
            yield inst


# --------------------------------------------------------------------------
# Solutions


def _saturate_full(store: FactStore, setting: Setting) -> None:
    full = [*setting.st_dependencies(), *(d for d in setting.target_dependencies() if d.label == "tc")]
    changed = True
    while changed:
        changed = False
        for d in full:
            for h in list(store.match(d.body)):
                for f in ground(d.head, h, setting.registry):
                    changed |= store.add(*f)


def _deficit(store: FactStore, s: ShexSchema) -> tuple[Value, Value, list[str]] | None:
    has = {(t[0], t[1]) for t in store.relation(TRIPLE)}
    for shape in s.shapes:
        for (n,) in sorted(store.relation(shape)):
            for c in s.defs[shape]:
                if c.mult.lower >= 1 and (n, c.predicate) not in has:
                    targets = sorted({
                        cc.target for t in s.shapes if (n,) in store.relation(t)
                        for cc in s.defs[t] if cc.predicate == c.predicate
                    })
                    return n, c.predicate, targets
    return None


def enumerate_solutions(
    source: Instance, setting: Setting, pool_size: int = 4, limit: int = 10_000, max_depth: int = 12
) -> Iterator[Instance]:
    """Solutions built from the forced facts by filling missing required edges.

    Objects come from existing values of the right kind or from at most
    ``pool_size`` fresh constants; every candidate is checked with
    ``satisfies`` before it is yielded.
    """
    s = setting.target
    deps = [*setting.st_dependencies(), *setting.target_dependencies()]
    egds = [d for d in compile_shex(s) if d.label == "mult<=1"]
    base = FactStore.of(source)
    _saturate_full(base, setting)
    target_rels = {TRIPLE, LIT, *s.defs}
    count = 0

    def go(inst: Instance, fresh_used: int, depth: int) -> Iterator[Instance]:
        nonlocal count
        store = FactStore.of(inst)
        _saturate_full(store, setting)
        if not satisfies(store, egds):
            return
        d = _deficit(store, s)
        if d is None:
            if satisfies(store, deps, setting.registry):
                count += 1
                yield store.to_instance().restrict(target_rels)
            return
        if depth >= max_depth:
            return
        node, p, targets = d
        want_lit = targets == [LIT]
        if LIT in targets and not want_lit:
            return
        dom = sorted(store.dom())
        cands = [v for v in dom if (v.kind is Kind.LIT) == want_lit]
        if fresh_used < pool_size:
            cands.append(lit(f"~{fresh_used}") if want_lit else iri(f"urn:pool:{fresh_used}"))
        for o in cands:
            if count >= limit:
                return
            nxt = Instance.from_facts([*store.to_instance(), (TRIPLE, (node, p, o))])
            is_new = o not in store.dom()
            yield from go(nxt, fresh_used + is_new, depth + 1)

    yield from go(base.to_instance(), 0, 0)


def has_solution(source: Instance, setting: Setting, pool_size: int = 4) -> bool:
    """Chase without inventing required edges, complete canonically, fall back to enumeration."""
    res = chase(source, setting, discharge_required=False)
    if res.status == "failed":
        return False
    done = canonical_completion(res.target, setting.target)  # type: ignore[arg-type]
    if satisfies(source.union(done), [*setting.st_dependencies(), *setting.target_dependencies()], setting.registry):
        return True
    return next(enumerate_solutions(source, setting, pool_size), None) is not None


def consistent_over_pool(setting: Setting, pool: Sequence[str]) -> tuple[bool, Instance | None]:
    """Does every valid instance over ``pool`` admit a solution?  Checks maximal instances only."""
    for inst in maximal_valid_instances(setting.source, pool):
        if not has_solution(inst, setting):
            return False, inst
    return True, None
