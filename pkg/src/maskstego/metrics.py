"""Payload and text-quality measurements.

Payload is bits per word with punctuation excluded from the word count.
Text quality is a pseudo-perplexity: each maskable token is masked alone,
scored by the LM, and the results averaged in log space. Positions are
scored independently, not autoregressively, so the number is comparable
across coders and prediction modes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import UndefinedPayloadError
from .lm import MaskedLM
from .masking import is_maskable
from .textcore import Token, TokenSequence, apply_masks

_PROB_FLOOR = 1e-12


def is_countable(token: Token) -> bool:
    """Words counted for payload rate: anything with an alphanumeric char."""
    return any(c.isalnum() for c in token.surface)


@dataclass(frozen=True)
class PayloadStats:
    bits: int
    countable_words: int
    bpw: float


def payload_bpw(text: TokenSequence, bits: int) -> PayloadStats:
    """Bits per word over the countable (non-punctuation) tokens."""
    countable = sum(1 for t in text if is_countable(t))
    if countable == 0:
        raise UndefinedPayloadError("text has no countable words")
    return PayloadStats(bits, countable, bits / countable)


def pseudo_perplexity(lm: MaskedLM, text: TokenSequence) -> float:
    """exp of the mean negative log probability of each maskable token.

    Each position is masked on its own and scored against the full
    distribution. Tokens the model cannot produce are floored at 1e-12 and
    reported once as a coverage warning.
    """
    if len(text) < 1:
        raise ValueError("text must contain at least one token")
    positions = [i for i, tok in enumerate(text) if is_maskable(tok)]
    if not positions:
        raise ValueError("text has no maskable tokens to score")
    log_total = 0.0
    missing = 0
    for i in positions:
        masked = apply_masks(text, [i])
        dist = lm.predict(masked, i, 0.0)
        p = dist.prob_of(text[i])
        if p is None or p <= 0.0:
            missing += 1
            p = _PROB_FLOOR
        log_total += math.log(p)
    if missing:
        warnings.warn(
            f"{missing} of {len(positions)} tokens were outside the model "
            "distribution; probabilities floored at 1e-12",
            RuntimeWarning,
            stacklevel=2,
        )
    return math.exp(-log_total / len(positions))
