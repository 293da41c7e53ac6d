"""Findings, the shallow name filter, and text/JSON report emission."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .model import LifecheckError
from .patterns import Kind

REPORT_VERSION = 1
FILTERS_ENV = "LIFECHECK_FILTERS"


class Confidence(str, Enum):
    HIGH = "high"  # confirmed by the alias pass
    LOW = "low"  # pattern only


# stages a finding can stop at
CANDIDATE = "candidate"
CONFIRMED = "confirmed"
PATTERN_ONLY = "pattern-only"
FILTERED = "filtered"


class ReportError(LifecheckError):
    pass


@dataclass(frozen=True)
class Finding:
    file: str
    line: int
    function: str
    kind: Kind
    source: str
    target: str
    confidence: Confidence
    stage: str
    suppressed_by: Optional[str] = None
    # used by the filter only; not serialized
    fn_name: str = field(default="", compare=False)
    trait: Optional[str] = field(default=None, compare=False)

    def sort_key(self):
        return (self.file, self.line, self.function, self.kind.rank, self.source, self.target)

    def to_json(self) -> dict:
        d = {
            "file": self.file,
            "line": self.line,
            "function": self.function,
            "kind": self.kind.value,
            "source": self.source,
            "target": self.target,
            "confidence": self.confidence.value,
            "stage": self.stage,
        }
        if self.suppressed_by is not None:
            d["suppressed_by"] = self.suppressed_by
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Finding":
        try:
            stage = d["stage"]
            return cls(
                file=d["file"],
                line=int(d["line"]),
                function=d["function"],
                kind=Kind(d["kind"]),
                source=d["source"],
                target=d["target"],
                confidence=Confidence(d["confidence"]),
                stage=stage,
                suppressed_by=d.get("suppressed_by"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ReportError(f"bad finding record: {exc}") from exc

    def text(self) -> str:
        return f"{self.file}:{self.line} {self.kind.value} {self.source} -> {self.target} [{self.confidence.value}]"


# -- shallow filter ---------------------------------------------------------------


@dataclass(frozen=True)
class FilterRule:
    name: str
    function: str
    trait: Optional[str] = None

    def matches(self, fn_name: str, trait: Optional[str]) -> bool:
        if not _glob(self.function, fn_name):
            return False
        if self.trait is None:
            return True
        return trait is not None and _glob(self.trait, trait)


def _glob(pattern: str, text: str) -> bool:
    # only `*` is special; fnmatch would also honour ? and [..]
    rx = ".*".join(re.escape(part) for part in pattern.split("*"))
    return re.fullmatch(rx, text) is not None


def apply_shallow_filter(findings: Sequence[Finding], rules: Sequence[FilterRule]) -> List[Finding]:
    out = []
    for f in findings:
        rule = next((r for r in rules if r.matches(f.fn_name, f.trait)), None)
        if rule is None or f.stage == FILTERED:
            out.append(f)
        else:
            out.append(replace(f, stage=FILTERED, suppressed_by=rule.name))
    return out


def parse_rules(data) -> List[FilterRule]:
    if isinstance(data, dict):
        data = data.get("rules")
    if not isinstance(data, list):
        raise ReportError("filter file must hold a list of rules")
    rules = []
    for item in data:
        try:
            rules.append(FilterRule(str(item["name"]), str(item["function"]), item.get("trait")))
        except (KeyError, TypeError) as exc:
            raise ReportError(f"bad filter rule {item!r}") from exc
    return rules


def load_rules(path: Optional[os.PathLike] = None) -> List[FilterRule]:
    """Rules from ``path``, else $LIFECHECK_FILTERS, else the bundled defaults."""
    path = path or os.environ.get(FILTERS_ENV)
    try:
        if path:
            text = Path(path).read_text(encoding="utf-8")
        else:
            text = resources.files("lifecheck").joinpath("data/default_filters.json").read_text(encoding="utf-8")
        return parse_rules(json.loads(text))
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportError(f"cannot load filter rules: {exc}") from exc


# -- emission ---------------------------------------------------------------------


def visible(findings: Iterable[Finding], verbose: bool = False) -> List[Finding]:
    return sorted((f for f in findings if verbose or f.stage != FILTERED), key=Finding.sort_key)


def emit_report(findings: Iterable[Finding], fmt: str = "text", verbose: bool = False) -> str:
    shown = visible(findings, verbose)
    if fmt == "json":
        doc = {"version": REPORT_VERSION, "findings": [f.to_json() for f in shown]}
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for f in shown:
        line = f.text()
        if f.suppressed_by:
            line += f" (filtered: {f.suppressed_by})"
        lines.append(line)
    return "".join(line + "\n" for line in lines)


def load_report(text: str) -> List[Finding]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"not a report: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != REPORT_VERSION:
        raise ReportError("unsupported report version")
    return [Finding.from_json(d) for d in doc.get("findings", [])]
