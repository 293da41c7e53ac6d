import json

import pytest

from lifecheck.patterns import Kind
from lifecheck.report import (
    CONFIRMED,
    FILTERED,
    Confidence,
    FilterRule,
    Finding,
    ReportError,
    apply_shallow_filter,
    emit_report,
    load_report,
    load_rules,
)


def finding(fn="bar", name=None, trait=None, source="(*arg2).y", kind=Kind.UAF_ARG_RETURN, line=6):
    return Finding("fig.rs", line, fn, kind, source, "*(ret.x)", Confidence.HIGH, CONFIRMED,
                   fn_name=name or fn.split("::")[-1], trait=trait)


def test_default_rules():
    names = [r.name for r in load_rules()]
    assert names == ["iter-next", "iter-next-back"]


def test_iterator_next_filtered():
    rules = load_rules()
    out = apply_shallow_filter([finding("Iter::next", trait="Iterator")], rules)
    assert out[0].stage == FILTERED and out[0].suppressed_by == "iter-next"


def test_next_outside_iterator_kept():
    out = apply_shallow_filter([finding("List::next")], load_rules())
    assert out[0].stage == CONFIRMED


def test_lru_iter_not_filtered():
    out = apply_shallow_filter([finding("LruCache::iter")], load_rules())
    assert out[0].suppressed_by is None


def test_empty_rules_identity():
    fs = [finding(), finding("Iter::next", trait="Iterator")]
    assert apply_shallow_filter(fs, []) == fs


def test_glob_is_star_only():
    assert FilterRule("r", "next*").matches("next_back", None)
    assert not FilterRule("r", "nex?").matches("next", None)
    assert not FilterRule("r", "[n]ext").matches("next", None)
    assert FilterRule("r", "get", "*Index*").matches("get", "std::ops::IndexMut")


def test_rule_file_from_env(tmp_path, monkeypatch):
    path = tmp_path / "rules.json"
    path.write_text(json.dumps([{"name": "all", "function": "*"}]))
    monkeypatch.setenv("LIFECHECK_FILTERS", str(path))
    assert load_rules() == [FilterRule("all", "*")]


def test_bad_rule_file(tmp_path):
    path = tmp_path / "rules.json"
    path.write_text('{"rules": [{"function": "x"}]}')
    with pytest.raises(ReportError):
        load_rules(path)


def test_text_line():
    assert emit_report([finding()]) == "fig.rs:6 uaf-arg-return (*arg2).y -> *(ret.x) [high]\n"


def test_text_orders_by_source():
    out = emit_report([finding(source="(*b).z"), finding(source="(*a).z")]).splitlines()
    assert [line.split()[2] for line in out] == ["(*a).z", "(*b).z"]


def test_filtered_hidden_unless_verbose():
    fs = apply_shallow_filter([finding("Iter::next", trait="Iterator")], load_rules())
    assert emit_report(fs) == ""
    assert "(filtered: iter-next)" in emit_report(fs, verbose=True)


def test_json_schema_and_key_order():
    doc = json.loads(emit_report([finding()], "json"))
    assert doc["version"] == 1
    assert list(doc["findings"][0]) == ["file", "line", "function", "kind", "source", "target", "confidence", "stage"]


def test_json_empty():
    assert json.loads(emit_report([], "json")) == {"version": 1, "findings": []}


def test_json_round_trip():
    fs = [finding(), finding(source="(*arg2).z", kind=Kind.NEM_ARG_RETURN)]
    fs += apply_shallow_filter([finding("Iter::next", trait="Iterator", line=9)], load_rules())
    assert load_report(emit_report(fs, "json", verbose=True)) == sorted(fs, key=Finding.sort_key)


def test_load_report_rejects_other_versions():
    with pytest.raises(ReportError):
        load_report('{"version": 2, "findings": []}')
