"""Deterministic 64-bit hashing primitives.

Both communicating parties derive positions, tie-break bits, and reference
model weights from these functions, so the exact recipes are frozen: any
change breaks extraction of previously embedded texts.
"""
from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def fnv1a_64(data: bytes) -> int:
    """FNV-1a over ``data``, 64-bit variant."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def splitmix64(x: int) -> int:
    """One splitmix64 step: golden-gamma increment then the mix finalizer."""
    z = (x + _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def unit_float(word: int) -> float:
    """Map a 64-bit word into (0, 1]: strictly positive, rarely exactly 1.

    The +0.5 keeps the bottom end away from zero, which downstream weight
    computations rely on; the top ~2^11 inputs round to exactly 1.0, which
    is harmless.
    """
    return (word + 0.5) / 18446744073709551616.0  # 2**64


def keyed_hash(data: bytes) -> int:
    """FNV-1a digest finished with the splitmix64 mixer.

    Raw FNV-1a low bits are parity-structured (the closing multiply by an
    odd prime preserves the xor's low bit), so anything that consumes low
    bits or small moduli must go through the finalizer.
    """
    return splitmix64(fnv1a_64(data))


def keyed_offset(key_bytes: bytes, modulus: int) -> int:
    """Stable offset in [0, modulus) derived from the shared key."""
    return keyed_hash(key_bytes) % modulus


def keyed_bit(key_bytes: bytes, position: int, node_index: int) -> int:
    """One key-dependent bit for a codebook tree node at a text position.

    The byte layout (key, 0x1E, position, 0x1F, node index; indices as
    decimal ASCII) is part of the cross-party contract.
    """
    material = b"%b\x1e%d\x1f%d" % (key_bytes, position, node_index)
    return keyed_hash(material) & 1
