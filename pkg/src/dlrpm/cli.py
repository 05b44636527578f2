"""Command-line entry point.

Subcommands:

  check       validate a knowledge base and test the fragment conditions
  graph       emit the projection signature graph as sorted adjacency text
  translate   compile a knowledge base into the ALCQI TBox serialization
  reason      decide a satisfiability or entailment task
  find-model  brute-force a finite model over small domains
  alcqi-sat   decide satisfiability of a serialized ALCQI TBox

Exit codes: 0 success (or answer "yes"), 1 failed check / negative answer,
2 input or parse errors, 3 resource limits.  ``alcqi-sat`` follows its own
convention: 0 satisfiable, 1 unsatisfiable, 2 for anything that prevented an
answer (bad input or resource limits).  All output is deterministic;
randomized internals take ``--seed`` (default 0, meaning off).
"""

from __future__ import annotations

import argparse
import sys

from . import alcqi, oracle, services, tableau
from .model import ConceptIncl, DlrError, KnowledgeBase
from .parser import ParseError, parse, parse_axiom, parse_concept, parse_relation
from .projection import build, format_graph, is_dlr_pm
from .renaming import canonicalize
from .tableau import ResourceLimitError
from .translate import Translation
from .wellformed import validate

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_INPUT if args.command != "alcqi-sat" else 2
    except OSError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return 2 if args.command == "alcqi-sat" else EXIT_RESOURCE
    except services.TaskRejected as err:
        print(f"task rejected: {err}", file=sys.stderr)
        return EXIT_FAIL
    except DlrError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dlrpm", description=__doc__.split("\n\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate and test the fragment conditions")
    p.add_argument("file")
    p.add_argument("--emit-graph", action="store_true", help="also print the projection graph")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("graph", help="print the projection signature graph")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_graph)

    p = sub.add_parser("translate", help="compile into an ALCQI TBox")
    p.add_argument("file")
    p.add_argument("--stats", action="store_true", help="append per-component axiom counts")
    p.set_defaults(handler=_cmd_translate)

    p = sub.add_parser("reason", help="decide a reasoning task")
    p.add_argument("file")
    p.add_argument(
        "--task",
        nargs="+",
        required=True,
        metavar=("KIND", "EXPR"),
        help="kbsat | csat <concept> | rsat <relation> | entails <axiom>",
    )
    p.add_argument("--seed", type=int, default=0, help="rule-order fuzzing seed (0 = off)")
    p.add_argument("--node-budget", type=int, default=10**6)
    p.set_defaults(handler=_cmd_reason)

    p = sub.add_parser("find-model", help="search for a finite model")
    p.add_argument("file")
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--max-tuples", type=int, default=4)
    p.add_argument("--nonempty", metavar="EXPR", help="require this expression non-empty")
    p.set_defaults(handler=_cmd_find_model)

    p = sub.add_parser("alcqi-sat", help="decide satisfiability of a serialized ALCQI TBox")
    p.add_argument("file")
    p.add_argument("--node-budget", type=int, default=10**6)
    p.set_defaults(handler=_cmd_alcqi_sat)
    return top


def _load(path: str) -> KnowledgeBase:
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read())


def _cmd_check(args: argparse.Namespace) -> int:
    kb = _load(args.file)
    report = is_dlr_pm(kb)
    print(report.summary())
    if args.emit_graph and not report.validation:
        print(format_graph(build(canonicalize(kb))), end="")
    return EXIT_OK if report.ok else EXIT_FAIL


def _cmd_graph(args: argparse.Namespace) -> int:
    kb = _load(args.file)
    diags = validate(kb)
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return EXIT_FAIL
    print(format_graph(build(canonicalize(kb))), end="")
    return EXIT_OK


def _cmd_translate(args: argparse.Namespace) -> int:
    kb = _load(args.file)
    tr = Translation(kb)
    print(alcqi.format_tbox(tr.tbox), end="")
    if args.stats:
        counts = tr.counts
        for part in ("dsj", "rel", "lobj", "axioms"):
            print(f"# {part}: {counts[part]}")
        print(f"# total: {sum(counts.values())}")
    return EXIT_OK


def _parse_task(spec: list[str], kb: KnowledgeBase) -> services.ReasoningTask:
    kind = spec[0]
    rest = " ".join(spec[1:])
    if kind == "kbsat":
        return services.KbSat()
    if not rest:
        raise DlrError(f"task {kind!r} needs an expression argument")
    if kind == "csat":
        return services.ConceptSat(parse_concept(rest, kb.signature))
    if kind == "rsat":
        return services.RelSat(parse_relation(rest, kb.signature))
    if kind == "entails":
        axiom = parse_axiom(rest, kb.signature)
        if isinstance(axiom, ConceptIncl):
            return services.EntailsConceptIncl(axiom.lhs, axiom.rhs)
        return services.EntailsRelIncl(axiom.lhs, axiom.rhs)
    raise DlrError(f"unknown task kind {kind!r} (use kbsat, csat, rsat, or entails)")


def _cmd_reason(args: argparse.Namespace) -> int:
    kb = _load(args.file)
    task = _parse_task(args.task, kb)
    answer = services.solve(kb, task, node_budget=args.node_budget, seed=args.seed)
    print(f"RESULT: {'true' if answer else 'false'}")
    return EXIT_OK


def _cmd_find_model(args: argparse.Namespace) -> int:
    kb = _load(args.file)
    witness = None
    if args.nonempty:
        try:
            witness = parse_concept(args.nonempty, kb.signature)
        except DlrError:
            witness = parse_relation(args.nonempty, kb.signature)
    model = oracle.find_model(
        kb, args.max_size, max_total_tuples=args.max_tuples, require_nonempty=witness
    )
    if model is None:
        print(f"no model found up to size {args.max_size}")
        return EXIT_FAIL
    print(oracle.format_model(model), end="")
    return EXIT_OK


def _cmd_alcqi_sat(args: argparse.Namespace) -> int:
    with open(args.file, encoding="utf-8") as handle:
        text = handle.read()
    try:
        tbox = alcqi.parse_tbox(text)
    except DlrError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    sat = tableau.check_tbox_satisfiable(tbox, node_budget=args.node_budget)
    print("satisfiable" if sat else "unsatisfiable")
    return 0 if sat else 1


if __name__ == "__main__":
    sys.exit(main())
