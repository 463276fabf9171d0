"""Relational to RDF data exchange under ShEx schemas."""

from .chase import (
    ChaseResult, ChaseStep, Homomorphism, NullAllocator, applicable_triggers, apply_hF,
    canonical_completion, chase, chase_step, exchange, find_homomorphism, homomorphically_equivalent,
)
from .consistency import (
    ContentiousPair, ViewFd, build_view_fd, contentious_pairs, functionally_overlapping, is_key_covered,
)
from .core import (
    LIT, TRIPLE, FunctionalDependency, Instance, Kind, Multiplicity, RelationalSchema, ShexSchema,
    TripleConstraint, TypedGraph, Value, blank, check_fds, inst_to_rdf, iri, lit, null_lit,
    rdf_to_inst, validate_typed_graph,
)
from .logic import Atom, Dependency, FnTerm, Var
from .mapping import (
    ConstructorRegistry, NormalizedStTgd, Setting, StTgd, check_fully_typed, default_interpretation,
    normalize,
)
from .shex2dep import DependencyGraph, compile, dependency_graph, is_weakly_recursive, satisfies

__version__ = "0.1.0"
