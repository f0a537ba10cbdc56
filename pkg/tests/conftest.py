from __future__ import annotations

from pathlib import Path

import pytest

from catafuse.engine import ConstraintEngine
from catafuse.parser import parse_problem

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def engine():
    eng = ConstraintEngine()
    yield eng
    eng.close()


@pytest.fixture(scope="session")
def insertion_sort_text() -> str:
    return (CORPUS / "insertion_sort.chc").read_text(encoding="utf-8")


@pytest.fixture()
def insertion_sort(insertion_sort_text):
    return parse_problem(insertion_sort_text)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS
