"""End-to-end embedding and extraction.

Embedding walks the planned positions in order. At each one it asks the LM
for a distribution over the current temporary text, thresholds it into a
candidate set, and picks the candidate whose code matches the next message
bits. The extractor replays the identical walk over the stego text: the
plan, contexts, distributions, and codebooks all reconstruct bit-exactly,
so reading off each observed token's code recovers the stream.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .coding import build_block_codebook, build_consistency_codebook, decode_step, encode_step, select_candidates
from .errors import CapacityError, UndefinedPayloadError
from .lm import MaskedLM
from .masking import MaskPlan, plan_masks, temporary_text
from .metrics import payload_bpw
from .textcore import Bits, StegoConfig, TokenSequence, apply_masks, frame_message, unframe_message

_HEADER_BITS = 32


@dataclass(frozen=True)
class PositionRecord:
    """What happened at one masked position."""

    index: int
    candidates: int
    token: str
    code: str | None  # None when the position carried no bits

    def annotation(self) -> str:
        return f"{self.token}({self.candidates},{self.code or '-'})"

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "candidates": self.candidates,
            "token": self.token,
            "code": self.code,
        }


@dataclass(frozen=True)
class EmbedReport:
    """Per-position trace of an embedding run plus payload accounting."""

    records: tuple[PositionRecord, ...]
    total_bits: int
    bpw: float

    def annotations(self) -> list[str]:
        return [r.annotation() for r in self.records]

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "total_bits": self.total_bits,
            "bpw": round(self.bpw, 2),
        }


def _build_codebook(cands, config: StegoConfig, position: int):
    if config.coder == "block":
        return build_block_codebook(cands)
    return build_consistency_codebook(cands, config.key, position)


def _embed_stream(
    cover: TokenSequence, stream: Sequence[int], config: StegoConfig, lm: MaskedLM
) -> tuple[TokenSequence, tuple[PositionRecord, ...], int]:
    """Embed a raw bit stream; returns (stego, records, bits consumed).

    ``consumed`` may exceed ``len(stream)``: the final codeword is completed
    with virtual zero bits, which the framing layer discards on extraction.
    No capacity check happens here; callers decide whether a shortfall is an
    error or a hand-off to the next cover text.
    """
    plan = plan_masks(cover, config.f, config.key)
    masked = apply_masks(cover, plan.indices)
    work = list(masked.tokens)
    consumed = 0
    records = []
    for j, pos in enumerate(plan.indices):
        if config.mode == "autoregressive":
            temp = temporary_text(TokenSequence(work), plan, j)
        else:
            temp = masked  # every step predicted from the fully masked text
        dist = lm.predict(temp, pos, config.t_p)
        cands = select_candidates(dist, config.t_p)
        w = cands.size
        exhausted = consumed >= len(stream)
        if exhausted or w == 0:
            # no data here: keep the original word
            chosen, code = cover[pos], None
        elif w >= 2:
            book = _build_codebook(cands, config, pos)
            chosen, used = encode_step(book, stream[consumed:])
            code = book.code_of(chosen)
            consumed += used
        else:
            chosen, code = cands.entries[0][0], None
        work[pos] = chosen
        records.append(PositionRecord(pos, w, chosen.surface, code))
    return TokenSequence(work), tuple(records), consumed


def _make_report(stego: TokenSequence, records: tuple[PositionRecord, ...]) -> EmbedReport:
    total_bits = sum(len(r.code) for r in records if r.code)
    try:
        bpw = payload_bpw(stego, total_bits).bpw
    except UndefinedPayloadError:
        bpw = 0.0
    return EmbedReport(records, total_bits, bpw)


def embed(
    cover: TokenSequence, message: Sequence[int], config: StegoConfig, lm: MaskedLM
) -> tuple[TokenSequence, EmbedReport]:
    """Hide ``message`` in ``cover``; returns the stego text and a report.

    Raises CapacityError (with the number of bits that did fit) when the
    framed message does not fully fit in this cover.
    """
    if len(cover) < 1:
        raise ValueError("cover text must contain at least one token")
    framed = frame_message(message)
    stego, records, consumed = _embed_stream(cover, framed, config, lm)
    if consumed < len(framed):
        raise CapacityError(
            f"cover holds only {consumed} of {len(framed)} framed bits",
            bits_consumed=consumed,
        )
    return stego, _make_report(stego, records)


def _bits_needed(acc: Bits) -> bool:
    if len(acc) < _HEADER_BITS:
        return True
    length = 0
    for b in acc[:_HEADER_BITS]:
        length = (length << 1) | b
    return len(acc) < _HEADER_BITS + length


def _extract_into(
    stego: TokenSequence, config: StegoConfig, lm: MaskedLM, acc: Bits
) -> None:
    """Replay the embedder's walk over one stego text, appending found bits."""
    plan = plan_masks(stego, config.f, config.key)
    masked = apply_masks(stego, plan.indices)
    work = list(masked.tokens)
    for j, pos in enumerate(plan.indices):
        if config.mode == "autoregressive":
            temp = temporary_text(TokenSequence(work), plan, j)
        else:
            temp = masked
        observed = stego[pos]
        if _bits_needed(acc):
            dist = lm.predict(temp, pos, config.t_p)
            cands = select_candidates(dist, config.t_p)
            if cands.size >= 2:
                book = _build_codebook(cands, config, pos)
                acc.extend(decode_step(book, observed))
        work[pos] = observed


def extract(stego: TokenSequence, config: StegoConfig, lm: MaskedLM) -> Bits:
    """Recover the embedded message bits from a stego text.

    Raises DesyncError when an observed token falls outside a reconstructed
    codebook, and TruncatedStreamError when the text ends before the length
    promised by the header was recovered.
    """
    if len(stego) < 1:
        raise ValueError("stego text must contain at least one token")
    acc: Bits = []
    _extract_into(stego, config, lm, acc)
    return unframe_message(acc)


def embed_many(
    covers: Sequence[TokenSequence],
    message: Sequence[int],
    config: StegoConfig,
    lm: MaskedLM,
) -> tuple[list[TokenSequence], list[EmbedReport]]:
    """Spread one message over several covers, filling them greedily in order.

    Covers after the one that exhausts the stream still pass through the
    pipeline; their masked positions end up holding original words.
    """
    if not covers:
        raise CapacityError("no cover texts supplied")
    framed = frame_message(message)
    offset = 0
    stegos: list[TokenSequence] = []
    reports: list[EmbedReport] = []
    for cover in covers:
        if len(cover) < 1:
            raise ValueError("cover text must contain at least one token")
        stego, records, consumed = _embed_stream(cover, framed[offset:], config, lm)
        offset = min(len(framed), offset + consumed)
        stegos.append(stego)
        reports.append(_make_report(stego, records))
    if offset < len(framed):
        raise CapacityError(
            f"covers hold only {offset} of {len(framed)} framed bits",
            bits_consumed=offset,
        )
    return stegos, reports


def extract_many(
    stegos: Sequence[TokenSequence], config: StegoConfig, lm: MaskedLM
) -> Bits:
    """Recover a message spread over several stego texts (in embed order)."""
    acc: Bits = []
    for stego in stegos:
        _extract_into(stego, config, lm, acc)
    return unframe_message(acc)
