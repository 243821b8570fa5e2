#!/usr/bin/env python3
"""Generate golden fixtures for the test suite.

Everything here is written straight-line, on purpose, without importing the
package: same frozen recipes, independent code. Fixture values produced by
this script are committed under tests/fixtures/ and the suite compares the
library against them, so a slip in either implementation shows up as a
mismatch instead of silently agreeing with itself.

Run from the repository root:  python3 tools/gen_fixtures.py
"""
from __future__ import annotations

import json
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

M64 = 0xFFFFFFFFFFFFFFFF
MASK_SURFACE = "[MASK]"
SPECIALS = {"[CLS]", "[SEP]", "[MASK]", "[PAD]", "[UNK]"}


# --- hashing primitives (re-derived from the frozen recipes) ----------------


def fnv1a_64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & M64
    return h


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return (z ^ (z >> 31)) & M64


def keyed_hash(data: bytes) -> int:
    # FNV low bits are parity-structured; finish with the splitmix mixer
    return splitmix64(fnv1a_64(data))


# --- masking -----------------------------------------------------------------


def maskable(surface: str) -> bool:
    if surface in SPECIALS or surface.startswith("##"):
        return False
    return any(c.isalpha() for c in surface)


def plan(tokens: list[str], f: int, key: bytes) -> list[int]:
    offset = keyed_hash(key) % f
    out = []
    rank = 0
    for i, s in enumerate(tokens):
        if not maskable(s):
            continue
        if rank % f == offset:
            out.append(i)
        rank += 1
    return out


# --- reference prediction -----------------------------------------------------


def predict(vocab: list[str], temporary: list[str], position: int, seed: int):
    material = (seed & M64).to_bytes(8, "big")
    material += b"\x1f".join(s.encode("utf-8") for s in temporary)
    material += b"\x1e" + str(position).encode("ascii")
    h = fnv1a_64(material)
    raws = []
    for i in range(len(vocab)):
        w = (splitmix64((h + i) & M64) + 0.5) / 2.0**64
        s = w * w  # fourth power via two squarings, matching the frozen recipe
        raws.append(s * s)
    total = sum(raws)
    pairs = [(v, r / total) for v, r in zip(vocab, raws)]
    pairs.sort(key=lambda e: (-e[1], e[0].encode("utf-8")))
    return pairs


def candidates(pairs, t_p: float):
    kept = [(v, p) for v, p in pairs if p > t_p and maskable(v)]
    total = sum(p for _, p in kept)
    return [(v, p / total) for v, p in kept]


# --- coding --------------------------------------------------------------------


def huffman(cands, key: bytes, position: int) -> dict[str, str]:
    # nodes: (weight, earliest_rank, token_or_None, children_or_None)
    nodes = [(q, rank, tok, None) for rank, (tok, q) in enumerate(cands)]
    live = list(nodes)
    while len(live) > 1:
        live.sort(key=lambda n: (n[0], n[1]))
        a, b = live[0], live[1]
        live = live[2:]
        live.append((a[0] + b[0], min(a[1], b[1]), None, (a, b)))
    root = live[0]

    codes: dict[str, str] = {}
    counter = [0]

    def walk(node, prefix):
        if node[3] is None:
            codes[node[2]] = prefix
            return
        index = counter[0]
        counter[0] += 1
        material = key + b"\x1e" + str(position).encode() + b"\x1f" + str(index).encode()
        bit = keyed_hash(material) & 1
        zero, one = (node[3][1], node[3][0]) if bit else (node[3][0], node[3][1])
        # pre-order: structural child 0 first regardless of label
        first, second = node[3]
        walk(first, prefix + ("1" if first is one else "0"))
        walk(second, prefix + ("1" if second is one else "0"))

    walk(root, "")
    return codes


def block_book(cands) -> dict[str, str]:
    l = len(cands).bit_length() - 1
    return {tok: format(i, f"0{l}b") for i, (tok, _) in enumerate(cands[: 2**l])}


def encode(codes: dict[str, str], remaining: list[int]):
    max_len = max(len(c) for c in codes.values())
    padded = "".join(str(b) for b in remaining[:max_len])
    padded += "0" * (max_len - len(padded))
    for tok, code in sorted(codes.items(), key=lambda kv: (len(kv[1]), kv[1])):
        if padded.startswith(code):
            return tok, code
    raise AssertionError("complete code failed to match")


# --- embedding walk -------------------------------------------------------------


def frame(bits: list[int]) -> list[int]:
    header = [(len(bits) >> (31 - i)) & 1 for i in range(32)]
    return header + bits


def embed_walk(cover, vocab, seed, f, t_p, key, coder, message_bits):
    stream = frame(message_bits)
    indices = plan(cover, f, key)
    work = list(cover)
    for i in indices:
        work[i] = MASK_SURFACE
    consumed = 0
    records = []
    for j, pos in enumerate(indices):
        temp = list(work)
        for later in indices[j:]:
            temp[later] = MASK_SURFACE
        pairs = predict(vocab, temp, pos, seed)
        cands = candidates(pairs, t_p)
        w = len(cands)
        if consumed >= len(stream) or w == 0:
            chosen, code = cover[pos], None
        elif w >= 2:
            codes = huffman(cands, key, pos) if coder == "consistency" else block_book(cands)
            chosen, code = encode(codes, stream[consumed:])
            consumed += len(code)
        else:
            chosen, code = cands[0][0], None
        work[pos] = chosen
        records.append({"index": pos, "candidates": w, "token": chosen, "code": code})
    return work, records, consumed


def pseudo_ppl(text, vocab, seed):
    total = 0.0
    count = 0
    for i, tok in enumerate(text):
        if not maskable(tok):
            continue
        temp = list(text)
        temp[i] = MASK_SURFACE
        pairs = predict(vocab, temp, i, seed)
        p = dict(pairs).get(tok, 1e-12)
        total += math.log(p)
        count += 1
    return math.exp(-total / count)


# --- fixture generation -----------------------------------------------------------


def load_vocab() -> list[str]:
    path = ROOT / "src" / "maskstego" / "data" / "vocab64.txt"
    return [line.strip() for line in path.read_text().splitlines() if line.strip()]


GOLDEN_COVER = (
    "the little city near the river was quiet that morning , "
    "and visitors from the old village walked across the stone bridge "
    "toward the busy market square to hear music at the summer festival . "
    "children played in the green meadow beside the calm lake while friends "
    "from the harbor carried silver lanterns up the quiet hill , past the "
    "wooden tower and the golden castle gate , and everyone stayed out late "
    "into the warm evening to watch the bright stars over the sleeping valley ."
).split()

GOLDEN_KEY = bytes.fromhex("00112233445566778899aabbccddeeff")
GOLDEN_MESSAGE_HEX = "deadbeefcafef00d"  # 64 bits


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    vocab = load_vocab()

    # 1. one full distribution at a fixed context
    context = ["the", "[MASK]", "little", "[MASK]", "near", "the", "river", "."]
    pairs = predict(vocab, context, 3, seed=42)
    kept = [(v, p) for v, p in pairs if p >= 0.02]
    (FIXTURES / "reference_predict.json").write_text(
        json.dumps(
            {
                "seed": 42,
                "context": context,
                "position": 3,
                "min_prob": 0.02,
                "entries": kept,
                "full_sum": sum(p for _, p in pairs),
            },
            indent=2,
        )
        + "\n"
    )

    # 2. byte-exact embedding walk
    message_bits = [
        (byte >> (7 - k)) & 1 for byte in bytes.fromhex(GOLDEN_MESSAGE_HEX) for k in range(8)
    ]
    stego, records, consumed = embed_walk(
        GOLDEN_COVER, vocab, 42, 3, 0.02, GOLDEN_KEY, "consistency", message_bits
    )
    (FIXTURES / "embed_golden.json").write_text(
        json.dumps(
            {
                "seed": 42,
                "f": 3,
                "t_p": 0.02,
                "key_hex": GOLDEN_KEY.hex(),
                "coder": "consistency",
                "mode": "autoregressive",
                "cover": GOLDEN_COVER,
                "message_hex": GOLDEN_MESSAGE_HEX,
                "stego": stego,
                "records": records,
                "consumed": consumed,
            },
            indent=2,
        )
        + "\n"
    )

    # 3. pseudo-perplexity of the golden stego text
    (FIXTURES / "pseudo_perplexity.json").write_text(
        json.dumps(
            {"seed": 42, "text": stego, "value": pseudo_ppl(stego, vocab, 42)},
            indent=2,
        )
        + "\n"
    )

    print(f"wrote fixtures to {FIXTURES}")
    print("stego:", " ".join(stego))
    print("consumed:", consumed)


if __name__ == "__main__":
    main()
