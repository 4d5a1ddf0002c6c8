"""Deterministic primitives: FNV-1a hashing, splitmix64, canonical JSON."""

from __future__ import annotations

import json
from typing import Any, Iterable

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x00000100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def fnv1a64_str(text: str) -> int:
    return fnv1a64(text.encode("utf-8"))


def hex16(value: int) -> str:
    """Render a 64-bit hash as 16 lowercase hex digits."""
    return format(value & _MASK64, "016x")


class SplitMix64:
    """splitmix64 PRNG; the single source of seeded randomness in the tool.

    Specified bit-exactly so the JS-side keystream in bench loaders can
    reproduce it with 32-bit limb arithmetic.
    """

    GAMMA = 0x9E3779B97F4A7C15
    M1 = 0xBF58476D1CE4E5B9
    M2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.M1) & _MASK64
        z = ((z ^ (z >> 27)) * self.M2) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n); n must be positive."""
        return int(self.next_float() * n)

    def choice(self, items: list) -> Any:
        return items[self.next_below(len(items))]

    def keystream(self, num_bytes: int) -> bytes:
        """num_bytes of keystream, 8 bytes (little-endian) per state advance."""
        out = bytearray()
        while len(out) < num_bytes:
            out.extend(self.next_u64().to_bytes(8, "little"))
        return bytes(out[:num_bytes])


def fold_key_to_seed(key: bytes) -> int:
    """Fold key bytes into a 64-bit seed by XOR of little-endian 8-byte words."""
    seed = 0
    for i in range(0, len(key), 8):
        chunk = key[i : i + 8]
        seed ^= int.from_bytes(chunk.ljust(8, b"\x00"), "little")
    return seed & _MASK64


def canonical_json(obj: Any) -> str:
    """Stable JSON used for golden files and hashing: sorted keys, no spaces."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(obj: Any) -> str:
    return hex16(fnv1a64_str(canonical_json(obj)))


def gram_hashes(tokens: Iterable[str], k: int) -> set[int]:
    """Hashes of all contiguous k-grams of a token stream."""
    toks = list(tokens)
    if len(toks) < k:
        return set()
    return {fnv1a64_str("\x1f".join(toks[i : i + k])) for i in range(len(toks) - k + 1)}
