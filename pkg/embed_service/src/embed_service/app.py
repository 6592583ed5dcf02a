"""FastAPI embedding service.

Two modes, selected by NOCL_EMBED_MODE:
  model -- a pretrained sentence encoder (default all-mpnet-base-v2),
           loaded in the background; requests get 503 until it is ready.
  hash  -- the deterministic test embedder; dimension from NOCL_EMBED_DIM.

Wire format: POST /embed {"texts": [...]} -> {"dim": d, "vectors": [[...]]},
GET /health -> {"status": "ok", "mode": ..., "dim": ...}. Response vector
order always matches request order. Texts longer than the configured limit
are truncated with a logged warning.
"""

from __future__ import annotations

import logging
import os
import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .hashing import hash_embed

log = logging.getLogger("embed_service")

MODE_ENV = "NOCL_EMBED_MODE"
DIM_ENV = "NOCL_EMBED_DIM"
DEFAULT_MODEL = "all-mpnet-base-v2"
DEFAULT_HASH_DIM = 768
DEFAULT_MAX_CHARS = 8192
DEFAULT_PORT = 8901


class EmbedRequest(BaseModel):
    texts: list[str]


class EmbedResponse(BaseModel):
    dim: int
    vectors: list[list[float]]


class HealthResponse(BaseModel):
    status: str
    mode: str
    dim: int
    pooling: str


class EncoderState:
    """Shared, read-only-after-load holder for the sentence encoder."""

    def __init__(self, model_name: str):
        self.model_name = model_name
        self.model = None
        self.dim: int | None = None
        self.error: str | None = None
        self._lock = threading.Lock()

    def load(self) -> None:
        try:
            from sentence_transformers import SentenceTransformer

            model = SentenceTransformer(self.model_name)
            with self._lock:
                self.model = model
                self.dim = int(model.get_sentence_embedding_dimension())
            log.info("loaded %s (dim=%d)", self.model_name, self.dim)
        except Exception as exc:  # surfaced through /health and 503s
            with self._lock:
                self.error = f"{type(exc).__name__}: {exc}"
            log.error("model load failed: %s", self.error)

    @property
    def ready(self) -> bool:
        return self.model is not None


def create_app(
    mode: str | None = None,
    dim: int | None = None,
    max_chars: int = DEFAULT_MAX_CHARS,
    model_name: str = DEFAULT_MODEL,
    defer_model_load: bool = False,
) -> FastAPI:
    mode = mode or os.environ.get(MODE_ENV, "model")
    if mode not in ("model", "hash"):
        raise ValueError(f"{MODE_ENV} must be 'model' or 'hash', got '{mode}'")
    hash_dim = dim or int(os.environ.get(DIM_ENV, DEFAULT_HASH_DIM))
    if hash_dim < 1:
        raise ValueError("embedding dimension must be >= 1")

    app = FastAPI(title="nocl-embed-service")
    state = EncoderState(model_name)
    app.state.mode = mode
    app.state.encoder = state
    if mode == "model" and not defer_model_load:
        threading.Thread(target=state.load, daemon=True).start()

    def current_dim() -> int:
        if mode == "hash":
            return hash_dim
        if not state.ready:
            detail = state.error or "model is still loading"
            raise HTTPException(status_code=503, detail=detail)
        return state.dim

    def truncate(texts: list[str]) -> list[str]:
        out = []
        for i, text in enumerate(texts):
            if len(text) > max_chars:
                log.warning("text %d truncated from %d to %d chars", i, len(text), max_chars)
                text = text[:max_chars]
            out.append(text)
        return out

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest) -> EmbedResponse:
        if not request.texts:
            raise HTTPException(status_code=400, detail="texts must be non-empty")
        texts = truncate(request.texts)
        d = current_dim()
        if mode == "hash":
            vectors = [hash_embed(t, d) for t in texts]
        else:
            encoded = state.model.encode(texts, convert_to_numpy=True)
            vectors = [[float(x) for x in row] for row in encoded]
        return EmbedResponse(dim=d, vectors=vectors)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        d = current_dim()  # 503s in model mode until loaded
        return HealthResponse(
            status="ok",
            mode=mode,
            dim=d,
            pooling="hash" if mode == "hash" else "model-default",
        )

    return app
