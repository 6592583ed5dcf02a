#!/usr/bin/env python3
"""Reference generator for the shared hash-embedder golden file.

Standalone on purpose: it re-states the FNV-1a/splitmix64 contract without
importing the package, so the golden vectors are an independent fixture that
both the library and the embedding service are checked against.

Usage:
    python scripts/make_hash_golden.py [out.json]
"""

import json
import math
import struct
import sys

MASK64 = (1 << 64) - 1
FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
SM64_GAMMA = 0x9E3779B97F4A7C15
SM64_MUL1 = 0xBF58476D1CE4E5B9
SM64_MUL2 = 0x94D049BB133111EB

GOLDEN_TEXTS = [
    "",
    "a",
    "b",
    "ab",
    "ba",
    "hello world",
    "Hello world",
    "This atom is carbon. Its degree is 2.",
    "Yes, these two nodes should be connected.",
    "Nope, these two nodes have no relation.",
    "<|BON|> <|NC|> 1 <|EON|> <|BOE|> <|EOE|>",
    "Title: Attention Is All You Need\nAbstract: The dominant sequence models...",
    "naïve café — ωμέγα",
    "数据图谱",
    "0123456789",
    "   leading and trailing   ",
    "line\nbreaks\nand\ttabs",
    "x" * 500,
    "the quick brown fox jumps over the lazy dog " * 8,
    "☃ snowman and emoji \U0001f600",
]
GOLDEN_DIMS = [4, 16, 768]


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def splitmix64_next(state: int) -> tuple[int, int]:
    state = (state + SM64_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * SM64_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SM64_MUL2) & MASK64
    return state, z ^ (z >> 31)


def hash_embed(text: str, dim: int) -> list[float]:
    state = fnv1a64(text.encode("utf-8"))
    values = []
    for _ in range(dim):
        state, u = splitmix64_next(state)
        values.append(((u >> 11) / 2.0**53) * 2.0 - 1.0)
    norm = math.sqrt(sum(v * v for v in values))
    if norm > 0.0:
        values = [v / norm for v in values]
    # freeze at 32-bit precision, the storage/wire width
    return [struct.unpack("<f", struct.pack("<f", v))[0] for v in values]


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "golden/hash_embed_golden.json"
    cases = []
    for text in GOLDEN_TEXTS:
        for dim in GOLDEN_DIMS:
            cases.append({"text": text, "dim": dim, "values": hash_embed(text, dim)})
    with open(out, "w", encoding="utf-8") as fh:
        json.dump({"cases": cases}, fh, ensure_ascii=False, indent=1)
        fh.write("\n")
    print(f"wrote {len(cases)} cases to {out}")


if __name__ == "__main__":
    main()
