from __future__ import annotations

import json
from pathlib import Path

import pytest

from maskstego import (
    MaskedLM,
    PredictionDistribution,
    ReferenceLM,
    SecretKey,
    Token,
    TokenSequence,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"
VOCAB_PATH = REPO_ROOT / "src" / "maskstego" / "data" / "vocab64.txt"
CORPUS_DIR = REPO_ROOT / "corpus"


def load_fixture(name: str) -> dict:
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def vocab64() -> list[Token]:
    words = [w for w in VOCAB_PATH.read_text(encoding="utf-8").split() if w]
    assert len(words) == 64
    return [Token(w) for w in words]


@pytest.fixture(scope="session")
def reference_lm(vocab64) -> ReferenceLM:
    return ReferenceLM(vocab64, seed=42)


@pytest.fixture
def key16() -> SecretKey:
    return SecretKey(b"0123456789abcdef")


class ScriptedLM(MaskedLM):
    """Test double replaying hand-written distributions.

    The script maps (context surfaces, position) to (surface, prob) pairs,
    so a test can pin exactly what the model says at every step.
    """

    def __init__(self, script: dict[tuple[tuple[str, ...], int], list[tuple[str, float]]]):
        self.script = script
        self.calls: list[tuple[tuple[str, ...], int]] = []

    def predict(self, temporary, position, min_prob):
        call = (tuple(t.surface for t in temporary), position)
        self.calls.append(call)
        if call not in self.script:
            raise KeyError(f"no scripted distribution for {call}")
        entries = [(Token(s), p) for s, p in self.script[call]]
        return PredictionDistribution.from_entries(entries, min_prob)

    def tokenize(self, raw):
        return TokenSequence.from_surfaces(raw.split())


class RecordingLM(MaskedLM):
    """Wrapper logging every (context, position) query made to a backend."""

    def __init__(self, inner: MaskedLM):
        self.inner = inner
        self.calls: list[tuple[tuple[str, ...], int]] = []

    def predict(self, temporary, position, min_prob):
        self.calls.append((tuple(t.surface for t in temporary), position))
        return self.inner.predict(temporary, position, min_prob)

    def tokenize(self, raw):
        return self.inner.tokenize(raw)


# --- acceptance summary ------------------------------------------------------

_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        _acceptance_results[item.name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_results.items():
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {status}  {name}")
