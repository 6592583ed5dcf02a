"""Node-concept embeddings: produce, hold, and persist them.

A store is a count x dim float32 matrix keyed by node id. Backends are
pluggable: an HTTP client for a real sentence encoder, and a dependency-free
hash embedder whose output is bit-reproducible across implementations (the
embedding service's test mode must match it exactly).

Store file layout (little-endian):
    magic "NCEM" | version u32 = 1 | dim u32 | count u64 | count*dim f32
with a text sidecar at <path>.ids, one "node_id<TAB>row" line per row.
"""

from __future__ import annotations

import math
import os
import struct
import time
from dataclasses import dataclass, field

import numpy as np

from .describe import NodeDescription
from .errors import BackendError, StoreFormatError
from .rng import Splitmix64, fnv1a64

STORE_MAGIC = b"NCEM"
STORE_VERSION = 1
DEFAULT_BACKEND_DIM = 768  # output size of the default sentence encoder; data, not law
RETRY_DELAYS = (0.5, 1.0, 2.0)


@dataclass
class EmbeddingStore:
    dim: int
    ids: list[str]
    rows: np.ndarray  # float32, shape (count, dim)
    id_index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.float32).reshape(len(self.ids), self.dim)
        if not np.all(np.isfinite(self.rows)):
            raise StoreFormatError("store contains non-finite values")
        self.id_index = {nid: i for i, nid in enumerate(self.ids)}
        if len(self.id_index) != len(self.ids):
            raise StoreFormatError("duplicate node ids in store")

    @property
    def count(self) -> int:
        return len(self.ids)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.id_index

    def vector(self, node_id: str) -> np.ndarray:
        return self.rows[self.id_index[node_id]]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EmbeddingStore)
            and self.dim == other.dim
            and self.ids == other.ids
            and self.rows.tobytes() == other.rows.tobytes()
        )


def hash_embed(text: str, dim: int) -> np.ndarray:
    """Deterministic unit-norm embedding of ``text``.

    Seed is FNV-1a 64 over the UTF-8 bytes; values come from a splitmix64
    chain, each 64-bit output u mapped to ((u >> 11) / 2^53) * 2 - 1, then
    the vector is L2-normalized. Bit-identical across implementations.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    stream = Splitmix64(fnv1a64(text.encode("utf-8")))
    values = np.empty(dim, dtype=np.float64)
    for i in range(dim):
        values[i] = ((stream.next_u64() >> 11) / 2.0**53) * 2.0 - 1.0
    norm = math.sqrt(float(np.dot(values, values)))
    if norm > 0.0:
        values /= norm
    return values


class HashEmbeddingBackend:
    """In-process test backend; no I/O, fully deterministic."""

    def __init__(self, dim: int = 16):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.reported_dim = dim

    @property
    def name(self) -> str:
        return f"hash:{self.reported_dim}"

    def embed(self, texts: list[str]) -> list[list[float]]:
        return [hash_embed(t, self.reported_dim).tolist() for t in texts]


class HttpEmbeddingBackend:
    """Client for the embedding service: POST /embed {"texts": [...]}.

    Transport errors are retried with exponential backoff before giving up.
    """

    def __init__(self, url: str, timeout: float = 60.0, retry_delays=RETRY_DELAYS):
        self.url = url.rstrip("/")
        self.timeout = timeout
        self.retry_delays = tuple(retry_delays)
        self.reported_dim = None  # learned from the first response or health check

    @property
    def name(self) -> str:
        return f"url:{self.url}"

    def _post(self, texts: list[str]) -> dict:
        import requests

        last_exc = None
        for attempt, delay in enumerate((0.0,) + self.retry_delays):
            if delay:
                time.sleep(delay)
            try:
                resp = requests.post(
                    f"{self.url}/embed", json={"texts": texts}, timeout=self.timeout
                )
                resp.raise_for_status()
                return resp.json()
            except requests.RequestException as exc:
                last_exc = exc
        raise BackendError(
            f"embedding backend at {self.url} failed after "
            f"{len(self.retry_delays) + 1} attempts: {last_exc}"
        ) from last_exc

    def health(self) -> dict:
        import requests

        try:
            resp = requests.get(f"{self.url}/health", timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except requests.RequestException as exc:
            raise BackendError(f"health check failed for {self.url}: {exc}") from exc

    def embed(self, texts: list[str]) -> list[list[float]]:
        body = self._post(texts)
        try:
            dim, vectors = int(body["dim"]), body["vectors"]
        except (KeyError, TypeError) as exc:
            raise BackendError(f"malformed embed response from {self.url}: {exc}") from exc
        if len(vectors) != len(texts):
            raise BackendError(
                f"backend returned {len(vectors)} vectors for {len(texts)} texts"
            )
        if any(len(v) != dim for v in vectors):
            raise BackendError("backend returned vectors inconsistent with reported dim")
        if self.reported_dim is None:
            self.reported_dim = dim
        return vectors


def embed_descriptions(
    descs: list[NodeDescription],
    backend,
    batch_size: int = 32,
) -> EmbeddingStore:
    """Embed in input order, batching requests; row order equals input order."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    ids = [d.node_id for d in descs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate node ids in descriptions: {dupes[:5]}")
    rows: list[list[float]] = []
    dim = None
    for start in range(0, len(descs), batch_size):
        batch = descs[start : start + batch_size]
        try:
            vectors = backend.embed([d.text for d in batch])
        except BackendError as exc:
            raise BackendError(
                f"batch starting at node '{batch[0].node_id}': {exc}"
            ) from exc
        batch_dim = len(vectors[0]) if vectors else backend.reported_dim
        if dim is None:
            dim = batch_dim
        elif batch_dim != dim:
            raise BackendError(
                f"dim mismatch between batches: {dim} then {batch_dim} "
                f"(batch starting at node '{batch[0].node_id}')"
            )
        rows.extend(vectors)
    if dim is None:
        dim = backend.reported_dim
        if dim is None:
            raise BackendError("backend did not report a dimension for an empty input")
    matrix = np.array(rows, dtype=np.float32).reshape(len(ids), dim)
    return EmbeddingStore(dim=dim, ids=ids, rows=matrix)


def write_store(store: EmbeddingStore, path) -> None:
    """Write the binary matrix plus the id sidecar at <path>.ids."""
    path = os.fspath(path)
    header = STORE_MAGIC + struct.pack("<IIQ", STORE_VERSION, store.dim, store.count)
    body = store.rows.astype("<f4", copy=False).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)
    with open(path + ".ids", "w", encoding="utf-8") as fh:
        for row, node_id in enumerate(store.ids):
            fh.write(f"{node_id}\t{row}\n")


def read_store(path) -> EmbeddingStore:
    path = os.fspath(path)
    with open(path, "rb") as fh:
        header = fh.read(20)
        if len(header) < 20:
            raise StoreFormatError(f"{path}: truncated header ({len(header)} bytes)")
        if header[:4] != STORE_MAGIC:
            raise StoreFormatError(f"{path}: bad magic {header[:4]!r}")
        version, dim, count = struct.unpack("<IIQ", header[4:])
        if version != STORE_VERSION:
            raise StoreFormatError(f"{path}: unsupported version {version}")
        body = fh.read()
    expected = count * dim * 4
    if len(body) != expected:
        raise StoreFormatError(
            f"{path}: expected {expected} data bytes for {count}x{dim}, got {len(body)}"
        )
    rows = np.frombuffer(body, dtype="<f4").reshape(count, dim).copy()

    ids: list[str] = [""] * count
    seen = set()
    sidecar = path + ".ids"
    with open(sidecar, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                node_id, row_str = line.split("\t")
                row = int(row_str)
            except ValueError as exc:
                raise StoreFormatError(f"{sidecar}:{lineno}: bad sidecar line") from exc
            if not (0 <= row < count):
                raise StoreFormatError(f"{sidecar}:{lineno}: row {row} out of range")
            if node_id in seen:
                raise StoreFormatError(f"{sidecar}:{lineno}: duplicate id '{node_id}'")
            if ids[row]:
                raise StoreFormatError(f"{sidecar}:{lineno}: duplicate row {row}")
            seen.add(node_id)
            ids[row] = node_id
    if count and any(not i for i in ids):
        raise StoreFormatError(f"{sidecar}: missing rows in sidecar")
    return EmbeddingStore(dim=dim, ids=ids, rows=rows)
