"""Deterministic, language-portable randomness.

Everything that samples (neighbor selection, splits, negative links, edge
ordering) runs on splitmix64 streams seeded through FNV-1a, so identical
inputs and seeds give bit-identical corpora on any platform.

Contract (shared with the embedding service's test mode):
  - FNV-1a 64: offset basis 14695981039346656037, prime 1099511628211,
    folded over UTF-8 bytes.
  - splitmix64: state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
    output z ^ z>>31. All arithmetic mod 2^64.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211

_SM64_GAMMA = 0x9E3779B97F4A7C15
_SM64_MUL1 = 0xBF58476D1CE4E5B9
_SM64_MUL2 = 0x94D049BB133111EB


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def derive_seed(*parts: object) -> int:
    """Fold arbitrary labels and a user seed into one 64-bit stream seed.

    Parts are joined with an unambiguous separator so ("ab", "c") and
    ("a", "bc") derive different seeds.
    """
    joined = "\x1f".join(str(p) for p in parts)
    return fnv1a64(joined.encode("utf-8"))


class Splitmix64(object):
    """A splitmix64 output stream with the sampling helpers the pipeline needs."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _SM64_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _SM64_MUL1) & MASK64
        z = ((z ^ (z >> 27)) * _SM64_MUL2) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of mantissa."""
        return (self.next_u64() >> 11) / 2.0**53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is < 2^-63 for any n here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: list, k: int) -> list:
        """k distinct items, order randomized, without replacement."""
        if k > len(items):
            raise ValueError(f"cannot sample {k} from {len(items)} items")
        pool = list(items)
        picked = []
        for _ in range(k):
            idx = self.next_below(len(pool))
            picked.append(pool.pop(idx))
        return picked

    def choice(self, items: list):
        if not items:
            raise ValueError("cannot choose from an empty list")
        return items[self.next_below(len(items))]
