"""End-to-end scan: parse, extract, match, confirm by alias analysis, filter."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .alias import may_flow
from .extract import DEFAULT_MAX_DEPTH
from .frontend import parse_crate
from .model import FunctionModel, LifecheckError, StructTable
from .patterns import CandidateViolation, check_function, flow_query
from .report import (
    CANDIDATE,
    CONFIRMED,
    PATTERN_ONLY,
    Confidence,
    FilterRule,
    Finding,
    apply_shallow_filter,
    load_rules,
)

log = logging.getLogger(__name__)


class ScanError(LifecheckError):
    pass


@dataclass(frozen=True)
class ScanConfig:
    alias: bool = True
    unknown_fields: bool = False
    filter: bool = True
    max_depth: int = DEFAULT_MAX_DEPTH
    # keep candidates of functions without an analyzable body, at low confidence
    keep_pattern_only: bool = True
    rules: Optional[Tuple[FilterRule, ...]] = None
    jobs: int = 4

    def filter_rules(self) -> Tuple[FilterRule, ...]:
        return self.rules if self.rules is not None else tuple(load_rules())


@dataclass
class ScanResult:
    findings: List[Finding] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)
    files: List[str] = field(default_factory=list)


def _finding(c: CandidateViolation, fn: FunctionModel, file: str, confidence: Confidence, stage: str) -> Finding:
    return Finding(
        file=file,
        line=fn.span.start_line,
        function=fn.qualname,
        kind=c.kind,
        source=str(c.source.path),
        target=str(c.target.path),
        confidence=confidence,
        stage=stage,
        fn_name=fn.name,
        trait=fn.impl_of.trait if fn.impl_of else None,
    )


def analyze_function(fn: FunctionModel, structs: StructTable, file: str, config: ScanConfig = ScanConfig()) -> List[Finding]:
    """Findings for one function before the name filter."""
    candidates = check_function(fn, structs, config.max_depth)
    if not config.alias:
        return [_finding(c, fn, file, Confidence.LOW, CANDIDATE) for c in candidates]
    if fn.body is None:
        if not config.keep_pattern_only:
            return []
        return [_finding(c, fn, file, Confidence.LOW, PATTERN_ONLY) for c in candidates]
    out = []
    for c in candidates:
        src, tgt = flow_query(c)
        if may_flow(fn.body, src, tgt, config.max_depth, config.unknown_fields):
            out.append(_finding(c, fn, file, Confidence.HIGH, CONFIRMED))
    return out


def scan_source(source: str, file: str, config: ScanConfig = ScanConfig(), rules=None) -> ScanResult:
    crate = parse_crate(source, file)
    found: List[Finding] = []
    for fn in crate.functions:
        found += analyze_function(fn, crate.structs, file, config)
    if config.filter:
        found = apply_shallow_filter(found, rules if rules is not None else config.filter_rules())
    found.sort(key=Finding.sort_key)
    return ScanResult(found, list(crate.diagnostics), [file])


def collect_files(paths: Sequence[Path]) -> List[Tuple[str, Path]]:
    """(display name, path) pairs; a directory contributes its .rs files by relative path."""
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for f in sorted(p.rglob("*.rs")):
                out.append((f.relative_to(p).as_posix(), f))
        elif p.is_file():
            out.append((p.name, p))
        else:
            raise ScanError(f"{p}: no such file or directory")
    return out


def scan_paths(paths: Sequence[Path], config: ScanConfig = ScanConfig()) -> ScanResult:
    files = collect_files(paths)
    rules = config.filter_rules() if config.filter else ()

    def one(item):
        name, path = item
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ScanError(f"{path}: {exc}") from exc
        return scan_source(text, name, config, rules)

    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        parts = list(pool.map(one, files))
    merged = ScanResult()
    for part in sorted(parts, key=lambda r: r.files[0]):
        merged.findings += part.findings
        merged.diagnostics += part.diagnostics
        merged.files += part.files
    merged.findings.sort(key=Finding.sort_key)
    return merged
