"""Command line front end: build, inspect and serve graphs.

Exit codes: 0 on success, 1 when the input is semantically invalid
(bad thresholds, unknown entities, usage errors), 2 when a file cannot
be read or parsed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import GraphError, LoadError
from .feedback import apply_consensus, load_events, replay_ledger
from .graph import EdgeStatus, KnowledgeGraph, export_dot, export_jsonl, import_jsonl
from .ingest import PredicateLexicon, ingest_documents, load_documents
from .qa import answer, answer_to_dict
from .scoring import finding_to_dict, identify_candidates
from .server import run_server


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _load_graph(args: argparse.Namespace) -> KnowledgeGraph:
    """Import the graph and, when a ledger is given, replay it and settle
    edge statuses with the configured thresholds."""
    graph = import_jsonl(args.kg)
    ledger_path = getattr(args, "ledger", None)
    if ledger_path:
        ledger = replay_ledger(graph, load_events(ledger_path))
        apply_consensus(
            graph,
            ledger,
            accept_threshold=getattr(args, "accept", 2.0),
            reject_threshold=getattr(args, "reject", -2.0),
        )
    return graph


def _cmd_ingest(args: argparse.Namespace) -> int:
    documents = load_documents(args.files)
    lexicon = PredicateLexicon.load(args.lexicon) if args.lexicon else None
    graph = ingest_documents(documents, lexicon)
    if args.out == "-":
        export_jsonl(graph, sys.stdout)
    else:
        export_jsonl(graph, args.out)
    print(
        f"ingested {len(documents)} document(s): "
        f"{len(graph.entities)} entities, {len(graph.edges)} edges",
        file=sys.stderr,
    )
    return 0


def _cmd_candidates(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    findings = identify_candidates(
        graph, tau_low=args.tau_low, tau_high=args.tau_high, max_results=args.max_results
    )
    json.dump([finding_to_dict(f) for f in findings], sys.stdout, ensure_ascii=False, indent=2)
    print()
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    run_server(config)
    return 0


def _cmd_consensus(args: argparse.Namespace) -> int:
    graph = import_jsonl(args.kg)
    ledger = replay_ledger(graph, load_events(args.ledger))
    apply_consensus(
        graph, ledger, accept_threshold=args.accept, reject_threshold=args.reject
    )
    out = args.out or args.kg
    export_jsonl(graph, out)
    statuses = [edge.status for edge in graph.edges.values()]
    print(
        json.dumps(
            {
                "edges": len(statuses),
                "active": sum(s is EdgeStatus.ACTIVE for s in statuses),
                "filtered": sum(s is EdgeStatus.FILTERED for s in statuses),
                "out": str(out),
            }
        )
    )
    return 0


def _cmd_qa(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    result = answer(args.question, graph, max_hops=args.max_hops)
    json.dump(answer_to_dict(result, graph), sys.stdout, ensure_ascii=False, indent=2)
    print()
    return 0


def _cmd_export_dot(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    sys.stdout.write(export_dot(graph))
    return 0


def _add_kg_options(parser: argparse.ArgumentParser, with_thresholds: bool = False) -> None:
    parser.add_argument("--kg", required=True, help="graph JSONL file")
    parser.add_argument("--ledger", help="feedback ledger JSONL to replay before use")
    if with_thresholds:
        parser.add_argument("--accept", type=float, default=2.0, help="accept threshold")
        parser.add_argument("--reject", type=float, default=-2.0, help="reject threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gamekg", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("ingest", help="extract a graph from document files")
    p.add_argument("files", nargs="+", help="text or JSON document files")
    p.add_argument("--out", default="-", help="output graph JSONL ('-' for stdout)")
    p.add_argument("--lexicon", help="extra predicate lexicon JSON")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("candidates", help="list suspect and missing fact findings")
    _add_kg_options(p)
    p.add_argument("--tau-low", type=float, default=0.2, dest="tau_low")
    p.add_argument("--tau-high", type=float, default=0.6, dest="tau_high")
    p.add_argument("--max-results", type=int, default=50, dest="max_results")
    p.set_defaults(func=_cmd_candidates)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", help="server config JSON file")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("consensus", help="replay a ledger and settle edge statuses")
    p.add_argument("--kg", required=True, help="graph JSONL file")
    p.add_argument("--ledger", required=True, help="feedback ledger JSONL")
    p.add_argument("--accept", type=float, default=2.0)
    p.add_argument("--reject", type=float, default=-2.0)
    p.add_argument("--out", help="write here instead of updating --kg in place")
    p.set_defaults(func=_cmd_consensus)

    p = sub.add_parser("qa", help="answer a question from the graph")
    _add_kg_options(p)
    p.add_argument("--max-hops", type=int, default=2, dest="max_hops")
    p.add_argument("question", help="the question text")
    p.set_defaults(func=_cmd_qa)

    p = sub.add_parser("export-dot", help="write the graph in DOT form")
    _add_kg_options(p)
    p.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"gamekg: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (LoadError, OSError) as exc:
        print(f"gamekg: error: {exc}", file=sys.stderr)
        return 2
    except GraphError as exc:
        print(f"gamekg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
