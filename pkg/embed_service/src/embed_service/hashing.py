"""Deterministic hash embedder, independently implemented from the contract.

Must stay bit-compatible with the pipeline's in-process embedder: seed is
FNV-1a 64 over UTF-8 bytes (offset 14695981039346656037, prime
1099511628211); values come from a splitmix64 chain, each output u mapped
to ((u >> 11) / 2^53) * 2 - 1; the vector is L2-normalized and rounded to
32-bit floats on the wire. The shared golden file pins the agreement.
"""

import math
import struct

MASK64 = (1 << 64) - 1
FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
SM64_GAMMA = 0x9E3779B97F4A7C15
SM64_MUL1 = 0xBF58476D1CE4E5B9
SM64_MUL2 = 0x94D049BB133111EB


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + SM64_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * SM64_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SM64_MUL2) & MASK64
    return state, z ^ (z >> 31)


def _round_f32(value: float) -> float:
    return struct.unpack("<f", struct.pack("<f", value))[0]


def hash_embed(text: str, dim: int) -> list[float]:
    """Unit-norm vector of `dim` 32-bit-rounded floats, deterministic in text."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    state = fnv1a64(text.encode("utf-8"))
    values = []
    for _ in range(dim):
        state, u = _splitmix64(state)
        values.append(((u >> 11) / 2.0**53) * 2.0 - 1.0)
    norm = math.sqrt(sum(v * v for v in values))
    if norm > 0.0:
        values = [v / norm for v in values]
    return [_round_f32(v) for v in values]
