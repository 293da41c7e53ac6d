from pathlib import Path

import pytest

from lifecheck.frontend import parse_crate

CORPUS = Path(__file__).resolve().parents[1] / "src" / "lifecheck" / "corpus"


def load(name):
    path = CORPUS / name
    return parse_crate(path.read_text(encoding="utf-8"), path.name)


@pytest.fixture
def corpus_dir():
    return CORPUS


@pytest.fixture
def fig():
    return load("fig.rs")


@pytest.fixture(autouse=True)
def _no_filter_env(monkeypatch):
    monkeypatch.delenv("LIFECHECK_FILTERS", raising=False)
