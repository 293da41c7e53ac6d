"""Command line driver: ``lifecheck scan`` and ``lifecheck eval``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .extract import DEFAULT_MAX_DEPTH
from .model import LifecheckError
from .pipeline import ScanConfig, scan_paths
from .report import emit_report, load_rules, visible

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _depth(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _add_scan_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-alias", action="store_true", help="report every pattern candidate (low confidence)")
    p.add_argument("--unknown-fields", action="store_true", help="link argument fields not yet seen at calls")
    p.add_argument("--no-filter", action="store_true", help="skip the name-based filter")
    p.add_argument("--max-depth", type=_depth, default=DEFAULT_MAX_DEPTH, metavar="N")
    p.add_argument("--drop-pattern-only", action="store_true",
                   help="drop candidates of functions whose body could not be analyzed")
    p.add_argument("--filters", metavar="FILE", help="filter rule file (default: $LIFECHECK_FILTERS or bundled)")
    p.add_argument("--jobs", type=int, default=4, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lifecheck", description="Find lifetime annotations that let unsafe code go wrong.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scan = sub.add_parser("scan", help="scan source files or directories")
    scan.add_argument("paths", nargs="+")
    scan.add_argument("--format", choices=("text", "json"), default="text")
    scan.add_argument("--verbose", "-v", action="store_true", help="also show filtered findings and diagnostics")
    _add_scan_flags(scan)

    ev = sub.add_parser("eval", help="score a labelled corpus manifest")
    ev.add_argument("manifest")
    _add_scan_flags(ev)
    return parser


def _config(args) -> ScanConfig:
    rules = None
    if not args.no_filter:
        rules = tuple(load_rules(args.filters))
    return ScanConfig(
        alias=not args.no_alias,
        unknown_fields=args.unknown_fields,
        filter=not args.no_filter,
        max_depth=args.max_depth,
        keep_pattern_only=not args.drop_pattern_only,
        rules=rules,
        jobs=args.jobs,
    )


def _scan(args) -> int:
    result = scan_paths(args.paths, _config(args))
    if args.verbose:
        for d in result.diagnostics:
            print(f"lifecheck: {d}", file=sys.stderr)
    sys.stdout.write(emit_report(result.findings, args.format, args.verbose))
    return EXIT_FINDINGS if visible(result.findings) else EXIT_CLEAN


def _eval(args) -> int:
    from .evaluate import evaluate_corpus, CorpusManifest

    metrics = evaluate_corpus(CorpusManifest.load(args.manifest), _config(args))
    sys.stdout.write(metrics.table())
    if metrics.regressions or metrics.precision < 1.0 or metrics.recall < 1.0:
        return EXIT_FINDINGS
    return EXIT_CLEAN


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="lifecheck: %(message)s")
    try:
        return _scan(args) if args.command == "scan" else _eval(args)
    except LifecheckError as exc:
        print(f"lifecheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
