"""Seeded random generators for schemas, typed graphs, settings and instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .core import (
    LIT, FunctionalDependency, Instance, Multiplicity, RelationalSchema, ShexSchema,
    TripleConstraint, TypedGraph, Value, blank, check_fds, iri, lit,
)
from .logic import Atom, FnTerm, Var
from .mapping import ConstructorRegistry, NormalizedStTgd, Setting
from .shex2dep import DEFAULT_PREFIX, is_weakly_recursive

MULTS = (Multiplicity.ONE, Multiplicity.OPT, Multiplicity.STAR, Multiplicity.PLUS)


def pred(name: str) -> Value:
    return iri(DEFAULT_PREFIX + name)


@dataclass(frozen=True)
class ShexParams:
    max_shapes: int = 4
    max_constraints: int = 3
    predicates: int = 4
    lit_weight: float = 0.4


def random_shex(rng: random.Random, params: ShexParams = ShexParams()) -> ShexSchema:
    names = [f"S{i}" for i in range(rng.randint(1, params.max_shapes))]
    preds = [pred(f"p{i}") for i in range(params.predicates)]
    defs = {}
    for n in names:
        k = rng.randint(0, min(params.max_constraints, len(preds)))
        cs = []
        for p in rng.sample(preds, k):
            target = LIT if rng.random() < params.lit_weight else rng.choice(names)
            cs.append(TripleConstraint(p, target, rng.choice(MULTS)))
        defs[n] = tuple(cs)
    return ShexSchema(defs)


def random_weakly_recursive_shex(rng: random.Random, params: ShexParams = ShexParams()) -> ShexSchema:
    """Rejection-sample until no cycle uses strong edges only."""
    while True:
        s = random_shex(rng, params)
        if is_weakly_recursive(s):
            return s


def random_typed_graph(rng: random.Random, s: ShexSchema, max_nodes: int = 8) -> TypedGraph:
    """A small graph whose typing only puts Lit on literals and shapes on non-literals.

    Half of the graphs are planted: the typing is chosen first and triples are
    added to meet the multiplicities, then one random edit is applied.  The
    rest are uniform noise.  This gives a healthy mix of valid and invalid pairs.
    """
    n = rng.randint(1, max_nodes)
    nodes: list[Value] = []
    for i in range(n):
        r = rng.random()
        nodes.append(iri(f"urn:n:{i}") if r < 0.45 else blank(f"g{i}") if r < 0.6 else lit(f"v{i}"))
    resources = [v for v in nodes if v.kind.value != "lit"] or [iri("urn:n:r")]
    literals = [v for v in nodes if v.kind.value == "lit"] or [lit("v")]
    preds = s.predicates() + [pred("extra")]
    shapes = s.shapes
    triples: set[tuple[Value, Value, Value]] = set()
    typing: dict[Value, set[str]] = {}

    if rng.random() < 0.5:
        for r in resources:
            if shapes and rng.random() < 0.6:
                typing.setdefault(r, set()).add(rng.choice(shapes))
        work = [(r, t) for r in resources for t in sorted(typing.get(r, ()))]
        seen = set()
        while work and len(seen) < 40:
            node, t = work.pop()
            if (node, t) in seen:
                continue
            seen.add((node, t))
            for c in s.defs[t]:
                lo = c.mult.lower
                hi = c.mult.upper if c.mult.upper is not None else 2
                for _ in range(rng.randint(lo, hi)):
                    if c.target == LIT:
                        o = rng.choice(literals)
                        typing.setdefault(o, set()).add(LIT)
                    else:
                        o = rng.choice(resources)
                        typing.setdefault(o, set()).add(c.target)
                        work.append((o, c.target))
                    triples.add((node, c.predicate, o))
        edit = rng.random()
        if edit < 0.25 and triples:
            triples.discard(rng.choice(sorted(triples)))
        elif edit < 0.5:
            triples.add((rng.choice(resources), rng.choice(preds), rng.choice(nodes)))
        elif edit < 0.6 and shapes:
            typing.setdefault(rng.choice(resources), set()).add(rng.choice(shapes))
    else:
        for _ in range(rng.randint(0, 2 * n)):
            triples.add((rng.choice(resources), rng.choice(preds), rng.choice(nodes)))
        for v in nodes:
            if v.kind.value == "lit":
                if rng.random() < 0.7:
                    typing.setdefault(v, set()).add(LIT)
            elif shapes:
                for t in shapes:
                    if rng.random() < 0.35:
                        typing.setdefault(v, set()).add(t)

    present = {x for tr in triples for x in (tr[0], tr[2])}
    return TypedGraph(
        frozenset(triples),
        {v: frozenset(ts) for v, ts in typing.items() if v in present},
    )


# --------------------------------------------------------------------------
# Relational side


def random_fds(rng: random.Random, rel: str, arity: int, p_fd: float = 0.7) -> list[FunctionalDependency]:
    if arity < 2 or rng.random() > p_fd:
        return []
    out = []
    for _ in range(rng.randint(1, 2)):
        positions = list(range(1, arity + 1))
        lhs = frozenset(rng.sample(positions, rng.randint(1, arity - 1)))
        rest = [i for i in positions if i not in lhs]
        if rng.random() < 0.5:
            rhs = frozenset(positions)
        else:
            rhs = frozenset(rng.sample(rest, rng.randint(1, len(rest))))
        out.append(FunctionalDependency(rel, lhs, rhs))
    return out


def random_relational_schema(
    rng: random.Random, max_relations: int = 2, max_arity: int = 3, p_fd: float = 0.7
) -> RelationalSchema:
    arities = {f"R{i}": rng.randint(1, max_arity) for i in range(rng.randint(1, max_relations))}
    fds = [fd for r, n in arities.items() for fd in random_fds(rng, r, n, p_fd)]
    return RelationalSchema.from_arities(arities, fds)


def random_body(
    rng: random.Random, schema: RelationalSchema, max_atoms: int, variables: Sequence[Var]
) -> tuple[Atom, ...]:
    rels = list(schema.relations)
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        r = rng.choice(rels)
        atoms.append(Atom(r, tuple(rng.choice(variables) for _ in range(schema.arity(r)))))
    return tuple(atoms)


def _vars_of(body: Sequence[Atom]) -> list[Var]:
    out: list[Var] = []
    for a in body:
        for t in a.terms:
            if isinstance(t, Var) and t not in out:
                out.append(t)
    return out


@dataclass(frozen=True)
class SettingParams:
    max_relations: int = 2
    max_arity: int = 3
    max_shapes: int = 2
    max_rules: int = 3
    max_body_atoms: int = 2
    n_variables: int = 3
    max_constructor_arity: int = 2


def random_setting(rng: random.Random, params: SettingParams = SettingParams()) -> Setting:
    """A fully-typed setting: one constructor per shape, rules consistent with the schema."""
    source = random_relational_schema(rng, params.max_relations, params.max_arity)
    shapes = [f"T{i}" for i in range(rng.randint(1, params.max_shapes))]
    preds = [pred(f"q{i}") for i in range(3)]
    defs = {}
    for t in shapes:
        cs = []
        for p in rng.sample(preds, rng.randint(1, 2)):
            target = LIT if rng.random() < 0.55 else rng.choice(shapes)
            cs.append(TripleConstraint(p, target, rng.choice(MULTS)))
        defs[t] = tuple(cs)
    target = ShexSchema(defs)
    ctor_arity = {t: rng.randint(1, params.max_constructor_arity) for t in shapes}
    variables = [Var(f"v{i}") for i in range(params.n_variables)]
    rules = []
    for i in range(rng.randint(1, params.max_rules)):
        t = rng.choice(shapes)
        c = rng.choice(target.defs[t])
        body = random_body(rng, source, params.max_body_atoms, variables)
        bv = _vars_of(body)
        subj = FnTerm(f"f{t}", tuple(rng.choice(bv) for _ in range(ctor_arity[t])))
        if c.target == LIT:
            obj: Var | FnTerm = rng.choice(bv)
        else:
            obj = FnTerm(f"f{c.target}", tuple(rng.choice(bv) for _ in range(ctor_arity[c.target])))
        rules.append(NormalizedStTgd(body, subj, t, c.predicate, obj, c.target, origin=i))
    reg = ConstructorRegistry({f"f{t}": ctor_arity[t] for t in shapes})
    return Setting(source, target, tuple(rules), reg)


def random_contentious_rules(
    rng: random.Random, schema: RelationalSchema, max_atoms: int = 3, n_variables: int = 4
) -> tuple[NormalizedStTgd, NormalizedStTgd, ShexSchema]:
    """Two rules sharing constructor ``f`` and predicate ``:c`` at multiplicity 1 or ?."""
    lit_obj = rng.random() < 0.5
    p = pred("c")
    obj_arity = rng.randint(1, 2)
    subj_arity = rng.randint(1, 2)
    defs = {"T": (TripleConstraint(p, LIT if lit_obj else "U", rng.choice((Multiplicity.ONE, Multiplicity.OPT))),), "U": ()}
    s = ShexSchema(defs)
    rules = []
    for k in range(2):
        variables = [Var(f"w{i}") for i in range(rng.randint(2, n_variables))]
        body = random_body(rng, schema, max_atoms, variables)
        bv = _vars_of(body)
        subj = FnTerm("f", tuple(rng.choice(bv) for _ in range(subj_arity)))
        if lit_obj:
            rules.append(NormalizedStTgd(body, subj, "T", p, rng.choice(bv), LIT, origin=k))
        else:
            obj = FnTerm("g", tuple(rng.choice(bv) for _ in range(obj_arity)))
            rules.append(NormalizedStTgd(body, subj, "T", p, obj, "U", origin=k))
    return rules[0], rules[1], s


def random_valid_instance(
    rng: random.Random, schema: RelationalSchema, pool: Sequence[str], max_facts: int = 8
) -> Instance:
    """Greedy: add random tuples, keeping only those that preserve the fds."""
    facts: list = []
    rels = list(schema.relations)
    for _ in range(rng.randint(0, max_facts)):
        r = rng.choice(rels)
        f = (r, tuple(lit(rng.choice(pool)) for _ in range(schema.arity(r))))
        if not check_fds(Instance.from_facts(facts + [f]), schema):
            facts.append(f)
    return Instance.from_facts(facts)
