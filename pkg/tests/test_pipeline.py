import pytest

from lifecheck.patterns import Kind
from lifecheck.pipeline import ScanConfig, ScanError, scan_paths, scan_source
from lifecheck.report import FILTERED, Confidence, emit_report

from conftest import CORPUS


def test_fig_default_one_high(corpus_dir):
    r = scan_paths([corpus_dir / "fig.rs"])
    assert emit_report(r.findings) == "fig.rs:6 uaf-arg-return (*arg2).y -> *(ret.x) [high]\n"


def test_fig_no_alias_four_low(corpus_dir):
    r = scan_paths([corpus_dir / "fig.rs"], ScanConfig(alias=False))
    assert len(r.findings) == 4
    assert {f.confidence for f in r.findings} == {Confidence.LOW}


def test_missing_body_is_pattern_only():
    src = "struct H { p: *mut i32 }\nfn f<'a>(h: &'a mut H) -> &'static mut i32 { match 1 { _ => loop {} } }"
    r = scan_source(src, "t.rs")
    assert r.findings and all(f.stage == "pattern-only" and f.confidence is Confidence.LOW for f in r.findings)
    assert scan_source(src, "t.rs", ScanConfig(keep_pattern_only=False)).findings == []


def test_iterator_trap_filtered_by_default():
    path = CORPUS / "ablation" / "iter_traps.rs"
    r = scan_paths([path])
    assert r.findings and all(f.stage == FILTERED for f in r.findings)
    assert all(f.stage != FILTERED for f in scan_paths([path], ScanConfig(filter=False)).findings)


def test_directory_names_are_relative(corpus_dir):
    r = scan_paths([corpus_dir])
    assert "ablation/positives.rs" in r.files and "fig.rs" in r.files
    assert r.files == sorted(r.files)


def test_missing_path():
    with pytest.raises(ScanError):
        scan_paths([CORPUS / "nope.rs"])


def _keys(findings):
    return {(f.file, f.function, f.kind, f.source, f.target) for f in findings if f.stage != FILTERED}


def test_flag_monotonicity(corpus_dir):
    default = _keys(scan_paths([corpus_dir]).findings)
    no_alias = _keys(scan_paths([corpus_dir], ScanConfig(alias=False)).findings)
    neither = _keys(scan_paths([corpus_dir], ScanConfig(alias=False, filter=False)).findings)
    assert default <= no_alias <= neither
    assert default < neither


def test_unknown_fields_only_adds(corpus_dir):
    default = _keys(scan_paths([corpus_dir]).findings)
    loose = _keys(scan_paths([corpus_dir], ScanConfig(unknown_fields=True)).findings)
    assert default <= loose


def test_max_depth_limits_paths(corpus_dir):
    r = scan_paths([corpus_dir / "lru.rs"], ScanConfig(max_depth=4))
    assert r.findings
    assert all(f.kind in Kind for f in r.findings)
