import json

import pytest

from lifecheck.evaluate import CorpusManifest, ManifestError, evaluate_corpus

from conftest import CORPUS


def manifest(tmp_path, doc):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    return path


def test_bug_corpus_perfect():
    m = evaluate_corpus(CorpusManifest.load(CORPUS / "manifest.json"))
    assert (m.precision, m.recall) == (1.0, 1.0)
    assert not m.vacuous and m.regressions == []
    assert len(m.reported) == 4


def test_known_miss_not_detected():
    m = evaluate_corpus(CorpusManifest.load(CORPUS / "manifest.json"))
    misses = [hit for e, hit in m.per_entry if e.label == "known-miss"]
    assert misses == [False]


def test_empty_manifest(tmp_path):
    with pytest.raises(ManifestError):
        CorpusManifest.load(manifest(tmp_path, {"files": [], "entries": []}))


def test_missing_file(tmp_path):
    with pytest.raises(ManifestError):
        CorpusManifest.load(manifest(tmp_path, {"files": ["absent.rs"]}))


def test_unknown_function(tmp_path):
    (tmp_path / "a.rs").write_text("fn f(x: i32) {}")
    path = manifest(tmp_path, {"entries": [{"file": "a.rs", "function": "g", "kind": "uaf-arg-arg", "label": "true-bug"}]})
    with pytest.raises(ManifestError):
        evaluate_corpus(CorpusManifest.load(path))


def test_bad_label(tmp_path):
    (tmp_path / "a.rs").write_text("fn f(x: i32) {}")
    path = manifest(tmp_path, {"entries": [{"file": "a.rs", "function": "f", "kind": "uaf-arg-arg", "label": "maybe"}]})
    with pytest.raises(ManifestError):
        CorpusManifest.load(path)


def test_vacuous_policy():
    doc = {"entries": [{"file": "waker.rs", "function": "waker", "kind": "uaf-arg-return", "label": "known-miss"}]}
    m = evaluate_corpus(CorpusManifest.from_dict(doc, CORPUS))
    assert (m.precision, m.recall) == (1.0, 1.0)
    assert m.precision_vacuous and m.recall_vacuous
    assert "vacuous" in m.table()


def test_regression_reported_when_known_miss_fires():
    doc = {"entries": [{"file": "fig.rs", "function": "bar", "kind": "uaf-arg-return", "label": "known-miss"}]}
    m = evaluate_corpus(CorpusManifest.from_dict(doc, CORPUS))
    assert [e.function for e in m.regressions] == ["bar"]


def test_ablation_default():
    m = evaluate_corpus(CorpusManifest.load(CORPUS / "ablation" / "manifest.json"))
    assert (m.precision, m.recall) == (1.0, 1.0)
    assert len(m.per_entry) == 14
