"""Command line entry point: compile-shex, check, exchange, validate."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .chase import DEFAULT_BUDGET, ChaseError, InvalidInstanceError, exchange
from .consistency import is_key_covered
from .core import SchemaError, validate_typed_graph
from .io import InputError, Project, emit_graph, read_graph
from .logic import ConfigurationError, DependencyError
from .mapping import MappingError, NotFullyTypedError
from .shex2dep import compile as compile_shex
from .shex2dep import format_dependency, is_weakly_recursive, short_iri

EXIT_OK, EXIT_NEGATIVE, EXIT_FAILED, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3, 4


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _instance_json(inst) -> dict:
    return {rel: [[v.text for v in t] for t in sorted(inst.relation(rel))] for rel in sorted({r for r, _ in inst})}


def analyse(project: Project) -> tuple[dict, int]:
    report: dict = {"fully_typed": False, "weakly_recursive": False, "key_covered": None, "witnesses": []}
    rec = is_weakly_recursive(project.target)
    report["weakly_recursive"] = rec.weakly_recursive
    if not rec:
        report["witnesses"].append({"kind": "strong_cycle", "shapes": list(rec.strong_cycle)})
    try:
        setting = project.setting()
    except NotFullyTypedError as e:
        report["witnesses"].append({"kind": "not_fully_typed", "rule": e.rule, "message": e.reason})
        return report, EXIT_NEGATIVE
    typed = setting.fully_typed()
    report["fully_typed"] = typed.ok
    for v in typed.violations:
        report["witnesses"].append({"kind": "not_fully_typed", "rule": v.rule, "condition": v.code, "message": v.message})
    if not typed:
        return report, EXIT_NEGATIVE
    cov = is_key_covered(setting)
    report["key_covered"] = cov.ok
    if not cov:
        pair = cov.witness
        assert pair is not None
        report["witnesses"].append({
            "kind": "not_functionally_overlapping",
            "rules": [pair.first.origin, pair.second.origin],
            "constructor": pair.constructor,
            "predicate": short_iri(pair.predicate),
            "counterexample": _instance_json(cov.counterexample),
        })
        return report, EXIT_NEGATIVE
    return report, EXIT_OK


def cmd_compile(args) -> int:
    project = Project.load(args.project)
    for dep in compile_shex(project.target):
        print(format_dependency(dep))
    return EXIT_OK


def cmd_check(args) -> int:
    report, code = analyse(Project.load(args.project))
    _dump(report)
    return code


def cmd_exchange(args) -> int:
    project = Project.load(args.project)
    setting = project.setting()
    typed = setting.fully_typed()
    for v in typed.violations:
        print(f"warning: rule {v.rule} is not fully typed ({v.code}): {v.message}", file=sys.stderr)
    source = project.instance(args.instance)
    out = exchange(source, setting, args.budget, complete=args.complete)
    res = out.result
    if args.trace:
        Path(args.trace).parent.mkdir(parents=True, exist_ok=True)
        Path(args.trace).write_text("".join(s.trace_line() + "\n" for s in res.trace), encoding="utf-8")
    summary: dict = {"status": res.status, "steps": len(res.trace)}
    if res.status == "failed":
        assert res.failure is not None
        summary["failure"] = res.failure.trace_line()
        _dump(summary)
        return EXIT_FAILED
    if res.status == "budget_exceeded":
        _dump(summary)
        return EXIT_BUDGET
    g = out.graph
    assert g is not None
    emit_graph(g, args.out)
    summary["triples"] = len(g.triples)
    summary["null_literals"] = sum(1 for n in g.nodes() if n.is_null and n.kind.value == "lit")
    summary["blank_nodes"] = sum(1 for n in g.nodes() if n.kind.value == "blank")
    _dump(summary)
    return EXIT_OK


def cmd_validate(args) -> int:
    project = Project.load(args.project)
    g = read_graph(args.graph, args.typing)
    v = validate_typed_graph(g, project.target)
    _dump({"valid": v.ok, "violations": list(v.violations)})
    return EXIT_OK if v else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shexdx", description="Relational to RDF data exchange under ShEx schemas.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile-shex", help="print the dependencies of schema.shex")
    p.add_argument("project")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("check", help="static analysis report as JSON")
    p.add_argument("project")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("exchange", help="chase the project instance into an RDF graph")
    p.add_argument("project")
    p.add_argument("--out", required=True)
    p.add_argument("--instance", help="instance directory (default: <project>/instance)")
    p.add_argument("--trace")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--complete", action="store_true", help="use canonical completion for required predicates")
    p.set_defaults(fn=cmd_exchange)

    p = sub.add_parser("validate", help="check a typed graph against schema.shex")
    p.add_argument("project")
    p.add_argument("--graph", required=True)
    p.add_argument("--typing", required=True)
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, SchemaError, MappingError, DependencyError, ConfigurationError,
            InvalidInstanceError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ChaseError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
