"""Precision/recall of a scan against a labelled corpus manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Set, Tuple

from .frontend import parse_crate
from .model import LifecheckError
from .patterns import Kind
from .pipeline import ScanConfig, scan_paths
from .report import FILTERED

TRUE_BUG = "true-bug"
KNOWN_FP = "known-false-positive"
KNOWN_MISS = "known-miss"
LABELS = (TRUE_BUG, KNOWN_FP, KNOWN_MISS)


class ManifestError(LifecheckError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    file: str
    function: str
    kind: Kind
    label: str


@dataclass
class CorpusManifest:
    root: Path
    files: List[str]
    entries: List[ManifestEntry]

    @classmethod
    def load(cls, path) -> "CorpusManifest":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifestError(f"{path}: {exc}") from exc
        return cls.from_dict(doc, path.parent)

    @classmethod
    def from_dict(cls, doc: dict, root: Path) -> "CorpusManifest":
        if not isinstance(doc, dict):
            raise ManifestError("manifest must be a JSON object")
        entries = []
        for raw in doc.get("entries", []):
            try:
                e = ManifestEntry(raw["file"], raw["function"], Kind(raw["kind"]), raw["label"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ManifestError(f"bad entry {raw!r}") from exc
            if e.label not in LABELS:
                raise ManifestError(f"bad label {e.label!r}")
            entries.append(e)
        files = list(doc.get("files", []))
        for e in entries:
            if e.file not in files:
                files.append(e.file)
        m = cls(Path(root), files, entries)
        m.validate()
        return m

    def validate(self) -> None:
        if not self.files:
            raise ManifestError("manifest lists no files")
        for f in self.files:
            if not (self.root / f).is_file():
                raise ManifestError(f"{f}: file not found under {self.root}")
        # scans name files by base name, so those must be unique
        bases = [Path(f).name for f in self.files]
        if len(set(bases)) != len(bases):
            raise ManifestError("manifest files must have distinct base names")
        seen: Set[Tuple[str, str, Kind]] = set()
        for e in self.entries:
            key = (e.file, e.function, e.kind)
            if key in seen:
                raise ManifestError(f"duplicate entry {e.file}:{e.function} {e.kind.value}")
            seen.add(key)


def _resolve(manifest: CorpusManifest) -> None:
    known: Dict[str, Set[str]] = {}
    for e in manifest.entries:
        if e.file not in known:
            crate = parse_crate((manifest.root / e.file).read_text(encoding="utf-8"), e.file)
            known[e.file] = {fn.qualname for fn in crate.functions}
        if e.function not in known[e.file]:
            raise ManifestError(f"{e.file}: no function {e.function}")


@dataclass
class Metrics:
    precision: float
    recall: float
    precision_vacuous: bool
    recall_vacuous: bool
    reported: List[Tuple[str, str]]
    per_entry: List[Tuple[ManifestEntry, bool]] = field(default_factory=list)
    regressions: List[ManifestEntry] = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return self.precision_vacuous or self.recall_vacuous

    def table(self) -> str:
        rows = [f"{'file':<16} {'function':<30} {'kind':<15} {'label':<21} detected"]
        for e, hit in self.per_entry:
            rows.append(f"{e.file:<16} {e.function:<30} {e.kind.value:<15} {e.label:<21} {'yes' if hit else 'no'}")
        p = f"{self.precision:.3f}" + (" (vacuous)" if self.precision_vacuous else "")
        r = f"{self.recall:.3f}" + (" (vacuous)" if self.recall_vacuous else "")
        rows.append(f"precision {p}  recall {r}  reported functions {len(self.reported)}")
        for e in self.regressions:
            rows.append(f"REGRESSION: {e.file} {e.function} {e.kind.value} ({e.label}) was detected")
        return "\n".join(rows) + "\n"


def evaluate_corpus(manifest: CorpusManifest, config: ScanConfig = ScanConfig()) -> Metrics:
    """Scan every manifest file and score the reported functions.

    A reported function is a true positive when it carries a true-bug entry
    whose kind is among its findings. Entries count as detected on an
    unfiltered finding of the same function and kind.
    """
    _resolve(manifest)
    result = scan_paths([manifest.root / f for f in manifest.files], config)
    names = {Path(f).name: f for f in manifest.files}
    kinds: Dict[Tuple[str, str], Set[Kind]] = {}
    for f in result.findings:
        if f.stage == FILTERED:
            continue
        kinds.setdefault((names.get(f.file, f.file), f.function), set()).add(f.kind)

    per_entry = [(e, e.kind in kinds.get((e.file, e.function), ())) for e in manifest.entries]
    bugs = [(e, hit) for e, hit in per_entry if e.label == TRUE_BUG]
    tp_fns = {(e.file, e.function) for e, hit in bugs if hit}
    reported = sorted(kinds)

    precision_vacuous = not reported
    precision = 1.0 if precision_vacuous else len(tp_fns) / len(reported)
    recall_vacuous = not bugs
    recall = 1.0 if recall_vacuous else sum(hit for _, hit in bugs) / len(bugs)
    regressions = [e for e, hit in per_entry if hit and e.label == KNOWN_MISS]
    return Metrics(precision, recall, precision_vacuous, recall_vacuous, reported, per_entry, regressions)
