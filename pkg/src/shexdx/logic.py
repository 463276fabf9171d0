"""Terms, atoms, dependencies and conjunctive matching over fact stores."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Union

from .core import Fact, Instance, Kind, Value

if TYPE_CHECKING:
    from .mapping import ConstructorRegistry


@dataclass(frozen=True, order=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name

    __repr__ = __str__


@dataclass(frozen=True, slots=True)
class FnTerm:
    """A constructor application ``f(t1, ..., tn)``; arguments never nest."""

    symbol: str
    args: tuple[Union[Var, Value], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            if isinstance(a, FnTerm):
                raise ValueError(f"nested function term in {self.symbol}(...)")

    def __str__(self) -> str:
        return f"{self.symbol}({', '.join(map(str, self.args))})"

    __repr__ = __str__


Term = Union[Var, Value, FnTerm]


@dataclass(frozen=True, slots=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    def variables(self) -> list[Var]:
        return term_variables(self.terms)

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(map(str, self.terms))})"

    __repr__ = __str__


def term_variables(terms: Iterable[Term]) -> list[Var]:
    """Variables in order of first occurrence."""
    out: list[Var] = []
    for t in terms:
        inner = t.args if isinstance(t, FnTerm) else (t,)
        for a in inner:
            if isinstance(a, Var) and a not in out:
                out.append(a)
    return out


def atoms_variables(atoms: Iterable[Atom]) -> list[Var]:
    return term_variables(t for a in atoms for t in a.terms)


class DependencyError(ValueError):
    pass


@dataclass(frozen=True)
class Dependency:
    """A tgd ``body => exists ys. head`` or an egd ``body => x = y``.

    ``null_kinds`` fixes, for each existential variable, whether the chase
    invents a null literal or a blank node for it.
    """

    kind: str
    body: tuple[Atom, ...]
    head: tuple[Atom, ...] = ()
    existentials: tuple[Var, ...] = ()
    equality: tuple[Var, Var] | None = None
    label: str = "st"
    name: str = ""
    null_kinds: tuple[tuple[Var, Kind], ...] = ()

    def __post_init__(self) -> None:
        for field_name in ("body", "head", "existentials", "null_kinds"):
            object.__setattr__(self, field_name, tuple(getattr(self, field_name)))
        if self.kind not in ("tgd", "egd"):
            raise DependencyError(f"unknown dependency kind {self.kind!r}")
        for a in self.body:
            if any(isinstance(t, FnTerm) for t in a.terms):
                raise DependencyError(f"function term in body atom {a}")
        body_vars = set(atoms_variables(self.body))
        if self.kind == "egd":
            if self.equality is None or self.head or self.existentials:
                raise DependencyError("an egd has exactly one equality and no head atoms")
            if not set(self.equality) <= body_vars:
                raise DependencyError("egd equates variables absent from its body")
        else:
            if self.equality is not None:
                raise DependencyError("a tgd has no equality")
            free = set(atoms_variables(self.head)) - body_vars - set(self.existentials)
            if free:
                raise DependencyError(f"head variables {sorted(free)} are neither bound nor existential")

    @property
    def body_variables(self) -> list[Var]:
        return atoms_variables(self.body)

    def null_kind(self, var: Var) -> Kind | None:
        return dict(self.null_kinds).get(var)

    def __str__(self) -> str:
        body = ", ".join(map(str, self.body))
        if self.kind == "egd":
            x, y = self.equality  # type: ignore[misc]
            return f"{body} => {x} = {y}"
        head = ", ".join(map(str, self.head))
        if self.existentials:
            head = f"exists {', '.join(map(str, self.existentials))}. {head}"
        return f"{body} => {head}"


class UnboundVariableError(KeyError):
    pass


class ConfigurationError(ValueError):
    """A function symbol cannot be resolved through the constructor registry."""


def evaluate(term: Term, h: Mapping[Var, Value], reg: ConstructorRegistry | None = None) -> Value:
    if isinstance(term, Var):
        try:
            return h[term]
        except KeyError:
            raise UnboundVariableError(term.name) from None
    if isinstance(term, Value):
        return term
    if reg is None:
        raise ConfigurationError(f"no constructor registry to evaluate {term}")
    return reg.interpret(term.symbol, tuple(evaluate(a, h, reg) for a in term.args))


def ground(atoms: Iterable[Atom], h: Mapping[Var, Value], reg: ConstructorRegistry | None = None) -> list[Fact]:
    return [(a.relation, tuple(evaluate(t, h, reg) for t in a.terms)) for a in atoms]


def partially_ground(atom: Atom, h: Mapping[Var, Value], reg: ConstructorRegistry | None) -> Atom:
    """Evaluate function terms and bound variables; leave free variables in place."""
    terms: list[Term] = []
    for t in atom.terms:
        if isinstance(t, Var):
            terms.append(h.get(t, t))
        elif isinstance(t, FnTerm):
            terms.append(evaluate(t, h, reg))
        else:
            terms.append(t)
    return Atom(atom.relation, tuple(terms))


class FactStore:
    """Mutable fact set with per-position and per-value indexes."""

    def __init__(self, facts: Iterable[Fact] = ()):
        self._rel: dict[str, set[tuple[Value, ...]]] = defaultdict(set)
        self._pos: dict[tuple[str, int, Value], set[tuple[Value, ...]]] = defaultdict(set)
        self._occ: dict[Value, set[Fact]] = defaultdict(set)
        for rel, tup in facts:
            self.add(rel, tup)

    @classmethod
    def of(cls, inst: Instance) -> FactStore:
        return cls(inst)

    def add(self, rel: str, tup: tuple[Value, ...]) -> bool:
        tup = tuple(tup)
        if tup in self._rel[rel]:
            return False
        self._rel[rel].add(tup)
        for i, v in enumerate(tup):
            self._pos[rel, i, v].add(tup)
            self._occ[v].add((rel, tup))
        return True

    def discard(self, rel: str, tup: tuple[Value, ...]) -> None:
        if tup not in self._rel.get(rel, ()):
            return
        self._rel[rel].discard(tup)
        for i, v in enumerate(tup):
            self._pos[rel, i, v].discard(tup)
            self._occ[v].discard((rel, tup))

    def replace(self, old: Value, new: Value) -> None:
        """Substitute ``new`` for ``old`` in every fact."""
        for rel, tup in sorted(self._occ.get(old, ())):
            self.discard(rel, tup)
            self.add(rel, tuple(new if v == old else v for v in tup))
        self._occ.pop(old, None)

    def __contains__(self, fact: Fact) -> bool:
        rel, tup = fact
        return tuple(tup) in self._rel.get(rel, ())

    def __len__(self) -> int:
        return sum(len(ts) for ts in self._rel.values())

    def relation(self, rel: str) -> set[tuple[Value, ...]]:
        return self._rel.get(rel, set())

    def dom(self) -> set[Value]:
        return {v for v, occ in self._occ.items() if occ}

    def to_instance(self) -> Instance:
        return Instance({r: frozenset(ts) for r, ts in self._rel.items()})

    def _candidates(self, atom: Atom, h: Mapping[Var, Value]) -> set[tuple[Value, ...]] | None:
        best: set[tuple[Value, ...]] | None = None
        for i, t in enumerate(atom.terms):
            v = h.get(t) if isinstance(t, Var) else t
            if isinstance(v, Value):
                s = self._pos.get((atom.relation, i, v), set())
                if best is None or len(s) < len(best):
                    best = s
        return best

    def match(self, atoms: Iterable[Atom], h: Mapping[Var, Value] | None = None) -> Iterator[dict[Var, Value]]:
        """Yield every extension of ``h`` mapping all atoms into the store."""
        atoms = list(atoms)
        for a in atoms:
            if any(isinstance(t, FnTerm) for t in a.terms):
                raise DependencyError(f"cannot match function term in {a}; ground it first")
        yield from self._match(atoms, dict(h or {}))

    def _match(self, atoms: list[Atom], h: dict[Var, Value]) -> Iterator[dict[Var, Value]]:
        if not atoms:
            yield dict(h)
            return
        # Most selective atom first.
        best_i, best_c = 0, None
        for i, a in enumerate(atoms):
            c = self._candidates(a, h)
            if c is None:
                c = self._rel.get(a.relation, set())
            if best_c is None or len(c) < len(best_c):
                best_i, best_c = i, c
                if not c:
                    return
        atom = atoms[best_i]
        rest = atoms[:best_i] + atoms[best_i + 1:]
        for tup in list(best_c or ()):
            if len(tup) != len(atom.terms):
                continue
            bound: list[Var] = []
            ok = True
            for t, v in zip(atom.terms, tup):
                if isinstance(t, Var):
                    cur = h.get(t)
                    if cur is None:
                        h[t] = v
                        bound.append(t)
                    elif cur != v:
                        ok = False
                        break
                elif t != v:
                    ok = False
                    break
            if ok:
                yield from self._match(rest, h)
            for t in bound:
                del h[t]

    def holds(self, atoms: Iterable[Atom], h: Mapping[Var, Value] | None = None) -> bool:
        return next(self.match(atoms, h), None) is not None
