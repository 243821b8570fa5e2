"""Exception hierarchy shared across the toolkit.

Every failure the embed/extract pipeline can signal maps to one class here,
so callers (and the CLI exit-code table) can dispatch on type.
"""
from __future__ import annotations


class StegoError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(StegoError):
    """Invalid or inconsistent configuration values."""


class CapacityError(StegoError):
    """The carrier cannot hold the payload (or the length field overflowed).

    ``bits_consumed`` reports how many payload bits were placed before the
    carrier ran out, which lets callers continue into another cover text.
    """

    def __init__(self, message: str, bits_consumed: int = 0):
        super().__init__(message)
        self.bits_consumed = bits_consumed


class DesyncError(StegoError):
    """Extractor observed a token outside the reconstructed codebook.

    Indicates a key, configuration, or model mismatch between the two
    parties; the stego text cannot be decoded under the given settings.
    """


class TruncatedStreamError(StegoError):
    """Recovered bitstream ended before the promised message length."""


class DegenerateSetError(StegoError):
    """A codebook was requested for fewer than two candidates."""


class TransportError(StegoError):
    """Network-level failure talking to the inference service (retryable)."""


class ProtocolError(StegoError):
    """The inference service answered with a malformed or invalid body."""


class DeterminismError(StegoError):
    """The inference service gave differing answers to identical requests."""


class UndefinedPayloadError(StegoError):
    """Payload rate is undefined (no countable words in the text)."""
