"""Masked-LM backends: the deterministic reference model and the HTTP client.

A backend answers one question: given a token sequence with a mask at one
position, what is the probability of each vocabulary token there? Both
parties must see bit-identical answers, so the reference model is built
from integer hashing only, and the remote client carries probabilities as
decimal strings end to end.
"""
from __future__ import annotations

import hashlib
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Sequence

import httpx

from .errors import ConfigError, DeterminismError, ProtocolError, TransportError
from .hashing import fnv1a_64, splitmix64, unit_float
from .masking import is_maskable
from .textcore import MASK, Token, TokenSequence

_FULL_MASS_TOLERANCE = 1e-6
_REMOTE_MASS_TOLERANCE = 1e-4


def canonical_order(entries: Iterable[tuple[Token, float]]) -> list[tuple[Token, float]]:
    """Sort entries by probability descending, ties by surface byte order."""
    return sorted(entries, key=lambda e: (-e[1], e[0].surface.encode("utf-8")))


@dataclass(frozen=True)
class PredictionDistribution:
    """Per-position token probabilities, truncated to ``prob >= min_prob``.

    Entries are in canonical order. Probabilities refer to the model's full
    vocabulary distribution (which sums to one); truncation only drops the
    tail below the requested floor.
    """

    entries: tuple[tuple[Token, float], ...]
    min_prob: float

    @classmethod
    def from_entries(
        cls, entries: Iterable[tuple[Token, float]], min_prob: float
    ) -> "PredictionDistribution":
        kept = canonical_order(e for e in entries if e[1] >= min_prob)
        seen: set[str] = set()
        for token, _ in kept:
            if token.surface in seen:
                raise ValueError(f"duplicate token {token.surface!r} in distribution")
            seen.add(token.surface)
        return cls(tuple(kept), min_prob)

    def __len__(self) -> int:
        return len(self.entries)

    def prob_of(self, token: Token) -> float | None:
        for tok, p in self.entries:
            if tok.surface == token.surface:
                return p
        return None


class MaskedLM(ABC):
    """Behavior contract shared by all backends.

    Implementations must be deterministic: identical inputs yield identical
    outputs across calls and across the embedding and extracting processes.
    """

    @abstractmethod
    def predict(
        self, temporary: TokenSequence, position: int, min_prob: float
    ) -> PredictionDistribution:
        """Distribution over tokens for the mask at ``position`` (0-based)."""

    @abstractmethod
    def tokenize(self, raw: str) -> TokenSequence:
        """Split raw text on this backend's token grid."""


# --- reference model --------------------------------------------------------


def reference_predict(
    vocab: Sequence[Token],
    temporary: TokenSequence,
    position: int,
    min_prob: float,
    seed: int,
) -> PredictionDistribution:
    """Bit-exact pseudo-random distribution over ``vocab``.

    Recipe (frozen): hash the seed, the full temporary text, and the target
    position with FNV-1a-64; draw one splitmix64 word per vocabulary index;
    map to (0,1); raise to the 4th power (skews mass toward a few tokens so
    realistic thresholds produce varied candidate counts); normalize.

    The context hash covers every token including which positions are
    masked, so predictions genuinely depend on earlier filling steps.
    """
    if not vocab:
        raise ValueError("reference vocabulary is empty")
    if not 0 <= position < len(temporary):
        raise IndexError(f"position {position} out of range")
    if temporary[position] is not MASK:
        raise ValueError(f"position {position} is not masked")

    material = bytearray((seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "big"))
    for i, token in enumerate(temporary):
        if i:
            material.append(0x1F)
        material.extend(token.surface.encode("utf-8"))
    material.append(0x1E)
    material.extend(str(position).encode("ascii"))
    h = fnv1a_64(bytes(material))

    raw = []
    for i in range(len(vocab)):
        w = unit_float(splitmix64((h + i) & 0xFFFFFFFFFFFFFFFF))
        square = w * w  # fourth power via two squarings: order is normative
        raw.append(square * square)
    total = sum(raw)
    return PredictionDistribution.from_entries(
        ((tok, r / total) for tok, r in zip(vocab, raw)), min_prob
    )


class ReferenceLM(MaskedLM):
    """Deterministic stand-in for a neural masked LM; whitespace tokenizer.

    The vocabulary file order is normative: index feeds the hash stream, so
    reordering the file changes every distribution.

    ``cache=True`` memoizes distributions per (context, position, floor).
    predict is referentially transparent, so this changes nothing but
    speed; it pays off in walks that revisit contexts (capacity probes,
    extraction after embedding on the same instance). Kept opt-in because
    the memo grows with every distinct context.
    """

    def __init__(self, vocab: Sequence[Token], seed: int, cache: bool = False):
        if not vocab:
            raise ConfigError("reference vocabulary is empty")
        seen: set[str] = set()
        for token in vocab:
            if not is_maskable(token):
                raise ConfigError(
                    f"reference vocab token {token.surface!r} is not maskable"
                )
            if token.surface in seen:
                raise ConfigError(f"duplicate vocab token {token.surface!r}")
            seen.add(token.surface)
        self.vocab = tuple(vocab)
        self.seed = seed
        self._cache: dict | None = {} if cache else None

    @classmethod
    def from_vocab_file(cls, path, seed: int) -> "ReferenceLM":
        with open(path, encoding="utf-8") as fh:
            words = [line.strip() for line in fh if line.strip()]
        return cls([Token(w) for w in words], seed)

    def predict(
        self, temporary: TokenSequence, position: int, min_prob: float
    ) -> PredictionDistribution:
        if self._cache is None:
            return reference_predict(
                self.vocab, temporary, position, min_prob, self.seed
            )
        key = (tuple(t.surface for t in temporary), position, min_prob)
        dist = self._cache.get(key)
        if dist is None:
            dist = reference_predict(
                self.vocab, temporary, position, min_prob, self.seed
            )
            self._cache[key] = dist
        return dist

    def tokenize(self, raw: str) -> TokenSequence:
        return TokenSequence.from_surfaces(raw.split())


# --- remote client ----------------------------------------------------------


def _format_decimal(value: float) -> str:
    return format(value, ".12g")


class RemoteLM(MaskedLM):
    """Client for the masked-LM inference service.

    Probabilities travel as decimal strings and are parsed identically on
    both sides, so embedder and extractor reconstruct the same floats. The
    first prediction is issued twice and the response digests compared; any
    later drift in the advertised model digest also raises.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0, client: httpx.Client | None = None):
        self.endpoint = endpoint.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)
        self._model_digest: str | None = None
        self._probed = False

    def close(self):
        self._client.close()

    # transport

    def _post(self, path: str, body: dict) -> tuple[dict, str]:
        url = f"{self.endpoint}{path}"
        try:
            response = self._client.post(url, json=body)
        except httpx.HTTPError as exc:
            raise TransportError(f"POST {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise ProtocolError(
                f"POST {url} returned {response.status_code}: {response.text[:200]}"
            )
        digest = hashlib.sha256(response.content).hexdigest()
        try:
            return response.json(), digest
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"POST {url} returned invalid JSON") from exc

    # protocol

    def tokenize(self, raw: str) -> TokenSequence:
        payload, _ = self._post("/v1/tokenize", {"text": raw})
        tokens = payload.get("tokens")
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise ProtocolError("tokenize response missing string token list")
        return TokenSequence.from_surfaces(tokens)

    def predict(
        self, temporary: TokenSequence, position: int, min_prob: float
    ) -> PredictionDistribution:
        if not 0 <= position < len(temporary):
            raise IndexError(f"position {position} out of range")
        if temporary[position] is not MASK:
            raise ValueError(f"position {position} is not masked")
        body = {
            "tokens": temporary.surfaces(),
            "mask_index": position,
            "min_prob": _format_decimal(min_prob),
        }
        payload, digest = self._post("/v1/predict", body)
        if not self._probed:
            self._probed = True
            repeat, repeat_digest = self._post("/v1/predict", body)
            if repeat_digest != digest:
                raise DeterminismError(
                    "service answered an identical probe with a different body"
                )
            del repeat
        return self._parse_prediction(payload, min_prob)

    def _parse_prediction(self, payload: dict, min_prob: float) -> PredictionDistribution:
        try:
            raw_entries = payload["entries"]
            total_mass = float(payload["total_mass"])
            model_digest = payload["model_digest"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed predict response: {exc}") from exc
        if abs(total_mass - 1.0) > _REMOTE_MASS_TOLERANCE:
            raise ProtocolError(
                f"full-distribution mass {total_mass} deviates from 1 beyond "
                f"{_REMOTE_MASS_TOLERANCE}"
            )
        if self._model_digest is None:
            self._model_digest = model_digest
        elif model_digest != self._model_digest:
            raise DeterminismError(
                f"model digest changed mid-run: {self._model_digest} -> {model_digest}"
            )
        entries = []
        try:
            for item in raw_entries:
                entries.append((Token(item["token"]), float(item["prob"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed prediction entry: {exc}") from exc
        return PredictionDistribution.from_entries(entries, min_prob)

    @property
    def model_digest(self) -> str | None:
        """Digest advertised by the service; both parties must see the same."""
        return self._model_digest


def remote_predict(
    endpoint: str, temporary: TokenSequence, position: int, min_prob: float
) -> PredictionDistribution:
    """One-shot remote prediction (opens and closes its own client)."""
    lm = RemoteLM(endpoint)
    try:
        return lm.predict(temporary, position, min_prob)
    finally:
        lm.close()
