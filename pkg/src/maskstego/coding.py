"""Candidate selection and prefix-free codebooks.

Two coders share one interface. The consistency coder builds a keyed
Huffman code over the thresholded, renormalized candidate distribution, so
likely tokens get short codes and are chosen more often under uniform
message bits. The block baseline keeps only the top 2^l candidates and
assigns every one the same fixed length l.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

from .errors import DegenerateSetError, DesyncError
from .hashing import keyed_bit
from .lm import PredictionDistribution, canonical_order
from .masking import is_maskable
from .textcore import Bits, SecretKey, Token


@dataclass(frozen=True)
class CandidateSet:
    """Tokens admitted at one position, with renormalized probabilities."""

    entries: tuple[tuple[Token, float], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def tokens(self) -> list[Token]:
        return [tok for tok, _ in self.entries]

    @classmethod
    def from_weights(cls, pairs: Iterable[tuple[Token, float]]) -> "CandidateSet":
        """Normalize arbitrary positive weights into a canonical candidate set."""
        ordered = canonical_order(pairs)
        total = sum(w for _, w in ordered)
        if total <= 0:
            return cls(())
        return cls(tuple((tok, w / total) for tok, w in ordered))


def select_candidates(dist: PredictionDistribution, t_p: float) -> CandidateSet:
    """Keep maskable tokens strictly above the threshold; renormalize.

    An empty result is legal and means the position cannot carry data.
    """
    kept = [(tok, p) for tok, p in dist.entries if p > t_p and is_maskable(tok)]
    total = sum(p for _, p in kept)
    if not kept:
        return CandidateSet(())
    return CandidateSet(tuple((tok, p / total) for tok, p in kept))


CodeBookKind = Literal["consistency", "block"]


@dataclass(frozen=True)
class CodeBook:
    """Prefix-free token-to-bitstring mapping for one position."""

    pairs: tuple[tuple[Token, str], ...]
    kind: CodeBookKind
    min_code_len: int = field(init=False)
    max_code_len: int = field(init=False)

    def __post_init__(self):
        lengths = [len(code) for _, code in self.pairs]
        object.__setattr__(self, "min_code_len", min(lengths))
        object.__setattr__(self, "max_code_len", max(lengths))

    def code_of(self, token: Token) -> str | None:
        for tok, code in self.pairs:
            if tok.surface == token.surface:
                return code
        return None

    def by_code(self) -> dict[str, Token]:
        return {code: tok for tok, code in self.pairs}

    def __contains__(self, token: Token) -> bool:
        return self.code_of(token) is not None

    def __len__(self) -> int:
        return len(self.pairs)


class _HuffNode:
    __slots__ = ("weight", "earliest", "token", "children")

    def __init__(self, weight, earliest, token=None, children=None):
        self.weight = weight
        self.earliest = earliest  # lowest candidate rank among constituents
        self.token = token
        self.children = children

    def __lt__(self, other):  # heap ordering: weight, then earliest constituent
        return (self.weight, self.earliest) < (other.weight, other.earliest)


def build_consistency_codebook(
    cands: CandidateSet, key: SecretKey, position: int
) -> CodeBook:
    """Keyed Huffman code over the candidate distribution.

    The tree shape is canonical (merge the two lowest weights, ties broken
    by the earliest candidate rank contained in each node), which pins the
    code-length multiset. The key then flips the 0/1 edge labels of each
    internal node independently, so the concrete bitstrings are secret while
    the lengths are not.
    """
    if cands.size < 2:
        raise DegenerateSetError(
            f"consistency codebook needs at least 2 candidates, got {cands.size}"
        )
    heap = [
        _HuffNode(q, rank, token=tok) for rank, (tok, q) in enumerate(cands.entries)
    ]
    heapq.heapify(heap)
    while len(heap) > 1:
        low = heapq.heappop(heap)
        high = heapq.heappop(heap)
        merged = _HuffNode(
            low.weight + high.weight,
            min(low.earliest, high.earliest),
            children=(low, high),
        )
        heapq.heappush(heap, merged)
    root = heap[0]

    # Pre-order traversal over internal nodes; structural child order stays
    # fixed so numbering is key-independent, only the edge labels swap.
    codes: dict[int, str] = {}
    stack = [(root, "")]
    next_index = 0
    while stack:
        node, prefix = stack.pop()
        if node.children is None:
            codes[node.earliest] = prefix
            continue
        bit = keyed_bit(key.data, position, next_index)
        next_index += 1
        labels = ("1", "0") if bit else ("0", "1")
        # push in reverse so child 0 is processed first
        stack.append((node.children[1], prefix + labels[1]))
        stack.append((node.children[0], prefix + labels[0]))

    return CodeBook(
        tuple((tok, codes[rank]) for rank, (tok, _) in enumerate(cands.entries)),
        "consistency",
    )


def build_block_codebook(cands: CandidateSet) -> CodeBook:
    """Fixed-length baseline: top 2^l candidates, l = floor(log2 w) bits each."""
    if cands.size < 2:
        raise DegenerateSetError(
            f"block codebook needs at least 2 candidates, got {cands.size}"
        )
    l = cands.size.bit_length() - 1
    pairs = tuple(
        (tok, format(i, f"0{l}b"))
        for i, (tok, _) in enumerate(cands.entries[: 2**l])
    )
    return CodeBook(pairs, "block")


def encode_step(book: CodeBook, remaining: Sequence[int]) -> tuple[Token, int]:
    """Pick the unique token whose code prefixes the remaining bits.

    A stream shorter than the deepest code is extended with zeros on the
    fly; the matching framing rule lets the extractor discard those bits.
    """
    by_code = book.by_code()
    prefix = ""
    for i in range(book.max_code_len):
        bit = remaining[i] & 1 if i < len(remaining) else 0
        prefix += "1" if bit else "0"
        token = by_code.get(prefix)
        if token is not None:
            return token, len(prefix)
    raise AssertionError(f"no code matched prefix {prefix!r}; codebook is not complete")


def decode_step(book: CodeBook, observed: Token) -> Bits:
    """Bits carried by the observed token; raises if it is not in the book."""
    code = book.code_of(observed)
    if code is None:
        raise DesyncError(
            f"token {observed.surface!r} is outside the reconstructed codebook; "
            "key, configuration, or model mismatch"
        )
    return [1 if c == "1" else 0 for c in code]
