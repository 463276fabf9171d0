"""The chase with IRI constructors, canonical completion, and homomorphisms."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import (
    LIT, NULL_PREFIX, TRIPLE, Fact, Instance, Kind, ShexSchema, TypedGraph, Value,
    blank, check_fds, inst_to_rdf, null_lit,
)
from .logic import Dependency, FactStore, Term, Var, evaluate, ground
from .mapping import ConstructorRegistry, Setting
from .shex2dep import compile as compile_shex
from .shex2dep import head_satisfied, satisfies

DEFAULT_BUDGET = 100_000

_NULL_RE = re.compile(rf"^(?:{NULL_PREFIX}|b)(\d+)$")


class ChaseError(RuntimeError):
    pass


class InvalidInstanceError(ValueError):
    pass


def apply_hF(h: Mapping[Var, Value], term: Term, reg: ConstructorRegistry | None = None) -> Value:
    """Image of a term under a variable assignment and the constructor interpretation."""
    return evaluate(term, h, reg)


def null_index(v: Value) -> int | None:
    if not v.is_null:
        return None
    m = _NULL_RE.match(v.text)
    return int(m.group(1)) if m else None


def _null_rank(v: Value) -> tuple:
    i = null_index(v)
    return (i is None, i or 0, v.kind, v.text)


class NullAllocator:
    """Hands out null literals ``__null_k`` and blanks ``b<k>`` from one counter.

    The counter starts above every index already present in ``used``, so fresh
    nulls never collide with the active domain.
    """

    def __init__(self, used: Iterable[Value] = ()):
        self._next = 1 + max((null_index(v) or 0 for v in used), default=0)
        self._taken = {v for v in used if v.is_null}

    def fresh(self, kind: Kind) -> Value:
        while True:
            k, self._next = self._next, self._next + 1
            v = null_lit(k) if kind is Kind.LIT else blank(f"b{k}")
            if v not in self._taken:
                self._taken.add(v)
                return v


@dataclass(frozen=True)
class Homomorphism:
    mapping: Mapping

    def __call__(self, x):
        return self.mapping.get(x, x)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}->{v}" for k, v in sorted(self.mapping.items())) + "}"


@dataclass(frozen=True)
class ChaseStep:
    dependency: Dependency
    trigger: tuple[tuple[Var, Value], ...]
    outcome: str  # "facts" | "merge" | "failure"
    added: tuple[Fact, ...] = ()
    kept: Value | None = None
    replaced: Value | None = None

    def trace_line(self) -> str:
        name = self.dependency.name or self.dependency.label
        binds = ", ".join(f"{v}={val}" for v, val in self.trigger)
        if self.outcome == "facts":
            what = "add " + "; ".join(f"{r}({', '.join(map(str, t))})" for r, t in self.added)
        elif self.outcome == "merge":
            what = f"merge {self.replaced} -> {self.kept}"
        else:
            what = "failure"
        return f"{name}\t{binds}\t{what}"


@dataclass(frozen=True)
class ChaseResult:
    status: str  # "solution" | "failed" | "budget_exceeded"
    trace: tuple[ChaseStep, ...] = ()
    target: Instance | None = None
    graph: TypedGraph | None = None
    failure: ChaseStep | None = None

    @property
    def ok(self) -> bool:
        return self.status == "solution"


def _trigger_key(dep: Dependency, h: Mapping[Var, Value]) -> tuple:
    return tuple(h[v] for v in dep.body_variables)


def _applicable(store: FactStore, dep: Dependency, reg: ConstructorRegistry | None) -> list[dict]:
    out = []
    for h in store.match(dep.body):
        if dep.kind == "egd":
            x, y = dep.equality  # type: ignore[misc]
            if h[x] != h[y]:
                out.append(h)
        elif not head_satisfied(store, dep, h, reg):
            out.append(h)
    out.sort(key=lambda h: _trigger_key(dep, h))
    return out


def applicable_triggers(
    inst: Instance, deps: Sequence[Dependency], reg: ConstructorRegistry | None = None
) -> list[tuple[Dependency, Homomorphism]]:
    store = FactStore.of(inst)
    return [(d, Homomorphism(h)) for d in deps for h in _applicable(store, d, reg)]


def _fire(
    store: FactStore, dep: Dependency, h: Mapping[Var, Value],
    reg: ConstructorRegistry | None, fresh: NullAllocator,
) -> ChaseStep:
    trigger = tuple((v, h[v]) for v in dep.body_variables)
    if dep.kind == "egd":
        x, y = dep.equality  # type: ignore[misc]
        a, b = h[x], h[y]
        if not a.is_null and not b.is_null:
            return ChaseStep(dep, trigger, "failure")
        if a.is_null and (not b.is_null or _null_rank(b) < _null_rank(a)):
            kept, replaced = b, a
        else:
            kept, replaced = a, b
        store.replace(replaced, kept)
        return ChaseStep(dep, trigger, "merge", kept=kept, replaced=replaced)
    ext = dict(h)
    for v in dep.existentials:
        kind = dep.null_kind(v)
        if kind is None:
            raise ChaseError(f"no null typing for existential {v} of {dep.name or dep}")
        ext[v] = fresh.fresh(kind)
    added = tuple(f for f in ground(dep.head, ext, reg) if store.add(*f))
    return ChaseStep(dep, trigger, "facts", added=added)


def chase_step(
    inst: Instance, dep: Dependency, trigger: Mapping[Var, Value] | Homomorphism,
    reg: ConstructorRegistry | None = None, fresh: NullAllocator | None = None,
) -> Instance | None:
    """Apply one trigger; ``None`` stands for the failed chase."""
    h = trigger.mapping if isinstance(trigger, Homomorphism) else trigger
    store = FactStore.of(inst)
    step = _fire(store, dep, h, reg, fresh or NullAllocator(inst.dom()))
    return None if step.outcome == "failure" else store.to_instance()


class _Budget(Exception):
    pass


def target_relations(s: ShexSchema) -> set[str]:
    return {TRIPLE, LIT, *s.defs}


def chase(
    source: Instance,
    setting: Setting,
    budget: int = DEFAULT_BUDGET,
    *,
    order: str = "forward",
    discharge_required: bool = True,
    verify: bool = True,
) -> ChaseResult:
    """Chase ``source`` with the st-tgds and the compiled target schema.

    St-tgds are saturated first; target dependencies then run round-robin in
    compile order (``order="reverse"`` flips both dependency and trigger
    order).  With ``discharge_required=False`` the existential ``mult>=1``
    dependencies are skipped, leaving them to ``canonical_completion``.
    """
    if order not in ("forward", "reverse"):
        raise ValueError(f"unknown order {order!r}")
    bad = check_fds(source, setting.source)
    if bad:
        v = bad[0]
        raise InvalidInstanceError(f"source violates {v.fd}: {v.first} vs {v.second}")
    reg = setting.registry
    st = list(setting.st_dependencies())
    tgt = [d for d in setting.target_dependencies() if discharge_required or d.label != "mult>=1"]
    if order == "reverse":
        st.reverse()
        tgt.reverse()

    store = FactStore.of(source)
    fresh = NullAllocator(store.dom())
    trace: list[ChaseStep] = []

    def fire(dep: Dependency, h: dict) -> ChaseStep:
        if len(trace) >= budget:
            raise _Budget
        step = _fire(store, dep, h, reg, fresh)
        trace.append(step)
        return step

    def triggers(dep: Dependency) -> list[dict]:
        hs = _applicable(store, dep, reg)
        return hs[::-1] if order == "reverse" else hs

    try:
        for dep in st:
            for h in triggers(dep):
                if not head_satisfied(store, dep, h, reg):
                    fire(dep, h)
        progress = True
        while progress:
            progress = False
            for dep in tgt:
                while True:
                    hs = triggers(dep)
                    if not hs:
                        break
                    progress = True
                    if dep.kind == "egd":
                        step = fire(dep, hs[0])
                        if step.outcome == "failure":
                            return ChaseResult("failed", tuple(trace), failure=step)
                        continue
                    for h in hs:
                        if not head_satisfied(store, dep, h, reg):
                            fire(dep, h)
    except _Budget:
        return ChaseResult("budget_exceeded", tuple(trace))

    if verify:
        check = satisfies(store, [*st, *tgt], reg)
        if not check:
            raise ChaseError(f"chase result violates {check.dependency.name}: {check.witness}")
    target = store.to_instance().restrict(target_relations(setting.target))
    return ChaseResult("solution", tuple(trace), target, inst_to_rdf(target))


# --------------------------------------------------------------------------
# Canonical completion


class CompletionError(ValueError):
    pass


def _tc_closure(store: FactStore, s: ShexSchema) -> None:
    tcs = [d for d in compile_shex(s) if d.label == "tc"]
    changed = True
    while changed:
        changed = False
        for d in tcs:
            for h in list(store.match(d.body)):
                for f in ground(d.head, h):
                    changed |= store.add(*f)


def canonical_completion(j: Instance, s: ShexSchema) -> Instance:
    """Discharge required predicates of ``j`` with canonical fresh nodes.

    ``j`` is first closed under the type-propagation tgds; it must then
    satisfy the at-most-one egds.  Each node missing a required predicate
    gets one canonical object, typed as every constraint on that predicate
    demands; such objects receive their own required predicates in turn.
    Along one chain a node is reused when the same (types, predicate)
    requirement recurs, which keeps the result finite for strongly
    recursive schemas.
    """
    store = FactStore.of(j)
    _tc_closure(store, s)
    egds = [d for d in compile_shex(s) if d.label == "mult<=1"]
    check = satisfies(store, egds)
    if not check:
        raise CompletionError(f"input violates {check.dependency.name}: {check.witness}")
    fresh = NullAllocator(store.dom())
    triples = store.relation(TRIPLE)
    has = {(t[0], t[1]) for t in triples}

    def types_of(n: Value) -> frozenset[str]:
        return frozenset(t for t in s.defs if (n,) in store.relation(t))

    def attach(node: Value, types: frozenset[str], path: dict) -> None:
        required = sorted(
            {c.predicate for t in types for c in s.defs[t] if c.mult.lower >= 1}
        )
        for p in required:
            if (node, p) in has:
                continue
            targets = sorted({c.target for t in types if (c := s.constraint(t, p))})
            key = (types, p)
            if key in path:
                obj, fresh_node = path[key], False
            else:
                if LIT in targets and len(targets) > 1:
                    raise CompletionError(f"{node} needs a {p} object that is both a literal and a shape")
                obj = fresh.fresh(Kind.LIT if targets == [LIT] else Kind.BLANK)
                fresh_node = True
            store.add(TRIPLE, (node, p, obj))
            has.add((node, p))
            for t in targets:
                store.add(t, (obj,))
            if fresh_node and targets != [LIT]:
                attach(obj, frozenset(targets), {**path, key: obj})

    for node in sorted({t[0] for t in triples} | {n for t in s.defs for (n,) in store.relation(t)}):
        ts = types_of(node)
        if ts:
            attach(node, ts, {})
    return store.to_instance()


# --------------------------------------------------------------------------
# Homomorphisms between instances


class HomomorphismSearchTooLarge(RuntimeError):
    pass


def find_homomorphism(
    j1: Instance, j2: Instance, *, max_nulls: int = 2000, max_nodes: int = 2_000_000
) -> Homomorphism | None:
    """A fact-preserving map from j1 to j2 that fixes every non-null value."""
    nulls = {v for v in j1.dom() if v.is_null}
    if len(nulls) > max_nulls:
        raise HomomorphismSearchTooLarge(f"{len(nulls)} nulls exceed the guard of {max_nulls}")
    pending: list[tuple[str, tuple[Value, ...], list[tuple[Value, ...]]]] = []
    for rel, tup in j1:
        if not any(v.is_null for v in tup):
            if (rel, tup) not in j2:
                return None
            continue
        cands = [
            t2 for t2 in sorted(j2.relation(rel))
            if len(t2) == len(tup) and all(v.is_null or v == w for v, w in zip(tup, t2))
        ]
        if not cands:
            return None
        pending.append((rel, tup, cands))

    asg: dict[Value, Value] = {}
    nodes = 0

    def fits(tup, t2) -> dict | None:
        local: dict[Value, Value] = {}
        for v, w in zip(tup, t2):
            if v.is_null:
                cur = asg.get(v, local.get(v))
                if cur is None:
                    local[v] = w
                elif cur != w:
                    return None
        return local

    def search(remaining: list) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise HomomorphismSearchTooLarge(f"search exceeded {max_nodes} nodes")
        if not remaining:
            return True
        best = None
        for i, (rel, tup, cands) in enumerate(remaining):
            opts = [(t2, loc) for t2 in cands if (loc := fits(tup, t2)) is not None]
            if best is None or len(opts) < len(best[1]):
                best = (i, opts)
                if len(opts) <= 1:
                    break
        i, opts = best  # type: ignore[misc]
        rest = remaining[:i] + remaining[i + 1:]
        for _, loc in opts:
            asg.update(loc)
            if search(rest):
                return True
            for k in loc:
                del asg[k]
        return False

    if not search(pending):
        return None
    return Homomorphism(dict(sorted(asg.items())))


def homomorphically_equivalent(j1: Instance, j2: Instance) -> bool:
    return find_homomorphism(j1, j2) is not None and find_homomorphism(j2, j1) is not None


@dataclass(frozen=True)
class ExchangeOutcome:
    result: ChaseResult
    completed: Instance | None = None
    graph: TypedGraph | None = field(default=None)


def exchange(
    source: Instance, setting: Setting, budget: int = DEFAULT_BUDGET, *, complete: bool = False
) -> ExchangeOutcome:
    """Run the chase, or (``complete=True``) chase without ``mult>=1`` and complete."""
    if not complete:
        res = chase(source, setting, budget)
        return ExchangeOutcome(res, res.target, res.graph)
    res = chase(source, setting, budget, discharge_required=False)
    if not res.ok:
        return ExchangeOutcome(res)
    done = canonical_completion(res.target, setting.target)  # type: ignore[arg-type]
    check = satisfies(source.union(done), [*setting.st_dependencies(), *setting.target_dependencies()], setting.registry)
    if not check:
        raise ChaseError(f"completion violates {check.dependency.name}")
    return ExchangeOutcome(res, done, inst_to_rdf(done))
