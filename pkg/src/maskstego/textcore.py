"""Core text and bit domain types: tokens, sequences, payload framing.

Tokens are immutable value objects; a token sequence is just an ordered
tuple of them. The mask sentinel is a dedicated subclass so that it never
compares equal to a vocabulary token, even one spelled "[MASK]".
"""
from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Sequence

from .errors import CapacityError, ConfigError, TruncatedStreamError

Bit = int
Bits = list[Bit]

MAX_MESSAGE_BITS = 2**32  # exclusive bound imposed by the 32-bit length field
_HEADER_BITS = 32


@dataclass(frozen=True)
class Token:
    """One text unit as produced by the active tokenizer."""

    surface: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")

    def __repr__(self) -> str:
        return f"Token({self.surface!r})"


class MaskToken(Token):
    """Sentinel occupying a masked position; equal only to itself."""

    def __eq__(self, other: object) -> bool:
        return other is self

    def __ne__(self, other: object) -> bool:
        return other is not self

    def __hash__(self) -> int:
        return object.__hash__(self)

    def __repr__(self) -> str:
        return "MASK"


#: The shared mask sentinel. Its surface is used for hashing and transport.
MASK = MaskToken("[MASK]")


@dataclass(frozen=True)
class TokenSequence:
    """Ordered, immutable sequence of tokens."""

    tokens: tuple[Token, ...]

    def __init__(self, tokens: Iterable[Token]):
        object.__setattr__(self, "tokens", tuple(tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, index: int) -> Token:
        return self.tokens[index]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def text(self) -> str:
        """Render as plain text; tokens joined by single spaces."""
        return " ".join(t.surface for t in self.tokens)

    @classmethod
    def from_surfaces(cls, surfaces: Iterable[str]) -> "TokenSequence":
        """Build a sequence, mapping the literal "[MASK]" to the sentinel."""
        return cls(MASK if s == MASK.surface else Token(s) for s in surfaces)


@dataclass(frozen=True)
class SecretKey:
    """Shared secret; both parties must hold identical bytes."""

    data: bytes

    MIN_LENGTH = 16

    def __post_init__(self):
        if len(self.data) < self.MIN_LENGTH:
            raise ConfigError(
                f"secret key must be at least {self.MIN_LENGTH} bytes, got {len(self.data)}"
            )

    def __repr__(self) -> str:  # never leak key material in logs
        return f"SecretKey(<{len(self.data)} bytes>)"


CoderKind = Literal["consistency", "block"]
PredictionMode = Literal["autoregressive", "parallel"]


@dataclass(frozen=True)
class StegoConfig:
    """Side information both parties must agree on before communicating."""

    f: int
    t_p: float
    key: SecretKey
    coder: CoderKind = "consistency"
    mode: PredictionMode = "autoregressive"
    lm_spec: str = ""

    def __post_init__(self):
        if self.f < 1:
            raise ConfigError(f"masking interval f must be >= 1, got {self.f}")
        if not 0.0 <= self.t_p <= 1.0:
            raise ConfigError(f"threshold t_p must be in [0, 1], got {self.t_p}")
        if self.coder not in ("consistency", "block"):
            raise ConfigError(f"unknown coder {self.coder!r}")
        if self.mode not in ("autoregressive", "parallel"):
            raise ConfigError(f"unknown prediction mode {self.mode!r}")


def apply_masks(text: TokenSequence, subset: Iterable[int]) -> TokenSequence:
    """Replace the tokens at the given 0-based positions with the sentinel.

    Positions outside [0, len) raise IndexError. Already-masked positions
    stay masked, so the operation is idempotent.
    """
    indices = set(subset)
    n = len(text)
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"mask index {i} out of range for length {n}")
    return TokenSequence(
        MASK if i in indices else tok for i, tok in enumerate(text.tokens)
    )


def frame_message(bits: Sequence[Bit]) -> Bits:
    """Prefix the message with its 32-bit big-endian length.

    Zero padding to complete the final codeword is applied on the fly during
    embedding, not here, so the framed form is exactly header plus message.
    """
    length = len(bits)
    if length >= MAX_MESSAGE_BITS:
        raise CapacityError(
            f"message of {length} bits overflows the 32-bit length field"
        )
    header = [(length >> (31 - i)) & 1 for i in range(_HEADER_BITS)]
    return header + [b & 1 for b in bits]


def unframe_message(bits: Sequence[Bit]) -> Bits:
    """Recover the message bits from a framed stream, dropping padding."""
    if len(bits) < _HEADER_BITS:
        raise TruncatedStreamError(
            f"framed stream has {len(bits)} bits, header needs {_HEADER_BITS}"
        )
    length = 0
    for b in bits[:_HEADER_BITS]:
        length = (length << 1) | (b & 1)
    if len(bits) < _HEADER_BITS + length:
        raise TruncatedStreamError(
            f"header promises {length} message bits, only "
            f"{len(bits) - _HEADER_BITS} present"
        )
    return [b & 1 for b in bits[_HEADER_BITS : _HEADER_BITS + length]]


@dataclass(frozen=True)
class MessagePayload:
    """A secret message with its framed (length-prefixed) form."""

    bits: tuple[Bit, ...]
    framed: tuple[Bit, ...] = field(repr=False, default=())

    @classmethod
    def from_bits(cls, bits: Sequence[Bit]) -> "MessagePayload":
        return cls(tuple(b & 1 for b in bits), tuple(frame_message(bits)))

    @property
    def length(self) -> int:
        return len(self.bits)


# --- bit payload I/O -------------------------------------------------------
#
# Payload files carry octets; bits are ordered most-significant-bit-first
# within each octet.


def bits_from_bytes(data: bytes) -> Bits:
    return [(byte >> (7 - i)) & 1 for byte in data for i in range(8)]


def bits_to_bytes(bits: Sequence[Bit]) -> bytes:
    if len(bits) % 8 != 0:
        raise ConfigError(f"bit count {len(bits)} is not a whole number of octets")
    out = bytearray()
    for i in range(0, len(bits), 8):
        value = 0
        for b in bits[i : i + 8]:
            value = (value << 1) | (b & 1)
        out.append(value)
    return bytes(out)


PayloadEncoding = Literal["hex", "base64"]


def decode_payload_text(text: str, encoding: PayloadEncoding) -> Bits:
    """Parse a hex or base64 payload file body into a bit list."""
    compact = "".join(text.split())
    try:
        if encoding == "hex":
            data = bytes.fromhex(compact)
        elif encoding == "base64":
            data = base64.b64decode(compact.encode("ascii"), validate=True)
        else:
            raise ConfigError(f"unknown payload encoding {encoding!r}")
    except (ValueError, binascii.Error) as exc:
        raise ConfigError(f"invalid {encoding} payload: {exc}") from exc
    return bits_from_bytes(data)


def encode_payload_text(bits: Sequence[Bit], encoding: PayloadEncoding) -> str:
    data = bits_to_bytes(bits)
    if encoding == "hex":
        return data.hex()
    if encoding == "base64":
        return base64.b64encode(data).decode("ascii")
    raise ConfigError(f"unknown payload encoding {encoding!r}")
