#!/usr/bin/env python3
"""Generate the bundled benchmark corpus: 100 deterministic cover texts.

Texts are sampled from the packaged 64-word vocabulary plus connective
filler and punctuation, seeded so the corpus is reproducible. Every text
has more than 20 countable words, the minimum the bench command accepts.

Run from the repository root:  python3 tools/make_corpus.py
"""
from __future__ import annotations

import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

FILLER = ["the", "a", "and", "near", "was", "were", "that", "with", "very", "quite"]
PUNCT = [".", ",", ";", "!", "?"]


def load_vocab() -> list[str]:
    path = ROOT / "src" / "maskstego" / "data" / "vocab64.txt"
    return [line.strip() for line in path.read_text().splitlines() if line.strip()]


def make_text(rng: random.Random, vocab: list[str]) -> str:
    length = rng.randint(35, 90)
    tokens: list[str] = []
    since_punct = 0
    while len(tokens) < length:
        roll = rng.random()
        if roll < 0.18 and since_punct >= 4:
            tokens.append(rng.choice(PUNCT))
            since_punct = 0
        elif roll < 0.45:
            tokens.append(rng.choice(FILLER))
            since_punct += 1
        else:
            tokens.append(rng.choice(vocab))
            since_punct += 1
    if tokens[-1] not in PUNCT:
        tokens.append(".")
    return " ".join(tokens)


def main():
    CORPUS.mkdir(exist_ok=True)
    vocab = load_vocab()
    rng = random.Random(20240901)
    for i in range(100):
        text = make_text(rng, vocab)
        countable = sum(1 for t in text.split() if any(c.isalnum() for c in t))
        assert countable > 20, f"text {i} too short ({countable})"
        (CORPUS / f"text{i:03d}.txt").write_text(text + "\n", encoding="utf-8")
    print(f"wrote 100 texts to {CORPUS}")


if __name__ == "__main__":
    main()
