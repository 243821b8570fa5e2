"""Keyed selection of masked positions and per-step temporary texts.

Position selection walks the subsequence of maskable tokens and keeps every
f-th one, starting at a key-derived offset. Because replacement candidates
are themselves filtered to maskable tokens, the extractor recomputes the
identical plan from the stego text.
"""
from __future__ import annotations

from dataclasses import dataclass

from .hashing import keyed_offset
from .textcore import MASK, SecretKey, Token, TokenSequence

SPECIAL_SURFACES = frozenset({"[CLS]", "[SEP]", "[MASK]", "[PAD]", "[UNK]"})
SUBWORD_PREFIX = "##"


def is_maskable(token: Token) -> bool:
    """True if the token may be masked and refilled with a stego word.

    Punctuation (no alphabetic characters), tokenizer specials, and subword
    continuations never carry data.
    """
    s = token.surface
    if s in SPECIAL_SURFACES or s.startswith(SUBWORD_PREFIX):
        return False
    return any(c.isalpha() for c in s)


@dataclass(frozen=True)
class MaskPlan:
    """The agreed set of masked positions (0-based, strictly increasing)."""

    indices: tuple[int, ...]
    f: int
    offset: int

    @property
    def size(self) -> int:
        return len(self.indices)


def plan_masks(text: TokenSequence, f: int, key: SecretKey) -> MaskPlan:
    """Select masked positions: maskable tokens whose rank r has r % f == offset.

    The offset comes from a keyed hash, so the same key and interval always
    pick the same positions for texts with equal maskable-flag sequences.
    """
    if f < 1:
        raise ValueError(f"masking interval f must be >= 1, got {f}")
    offset = keyed_offset(key.data, f)
    indices = []
    rank = 0
    for i, token in enumerate(text):
        if not is_maskable(token):
            continue
        if rank % f == offset:
            indices.append(i)
        rank += 1
    return MaskPlan(tuple(indices), f, offset)


def temporary_text(work: TokenSequence, plan: MaskPlan, j: int) -> TokenSequence:
    """Context fed to the LM at step ``j`` (0-based).

    Positions for steps before ``j`` keep their already-chosen tokens;
    positions from ``j`` onward are masked. Step 0 therefore yields the
    fully masked text.
    """
    if not 0 <= j < plan.size:
        raise IndexError(f"step {j} out of range for plan of size {plan.size}")
    pending = set(plan.indices[j:])
    return TokenSequence(
        MASK if i in pending else tok for i, tok in enumerate(work)
    )
