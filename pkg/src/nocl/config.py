"""Pipeline configuration: one YAML file, environment and CLI overrides."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError

EMBED_URL_ENV = "NOCL_EMBED_URL"
DEFAULT_LINK_RATIOS = (0.85, 0.05, 0.10)


@dataclass
class DatasetConfig:
    name: str
    graphs: Path
    schema: str | None = None  # feature schema for non-TAG payloads
    categories: list[str] = field(default_factory=list)  # node-task label set
    question_key: str | None = None  # graph-task question registry key


@dataclass
class PipelineConfig:
    datasets: dict[str, DatasetConfig]
    out_dir: Path
    schemas_dir: Path | None = None
    templates: Path | None = None
    embed_backend: str = "hash:16"  # "hash:<dim>" or "url"
    embed_url: str | None = None
    embed_batch_size: int = 32
    seed: int = 0
    max_nodes: int = 11
    hops: int = 1
    link_ratios: tuple[float, float, float] = DEFAULT_LINK_RATIOS
    graph_train_frac: float = 0.8
    config_hash: str = "none"

    def dataset(self, name: str) -> DatasetConfig:
        if name not in self.datasets:
            raise ConfigError(
                f"unknown dataset '{name}'; configured: {', '.join(sorted(self.datasets))}"
            )
        return self.datasets[name]

    def resolved_embed_url(self) -> str | None:
        return os.environ.get(EMBED_URL_ENV) or self.embed_url


def _require_path(path: Path, what: str) -> Path:
    if not path.exists():
        raise ConfigError(f"{what} does not exist: {path}")
    return path


def load_config(path) -> PipelineConfig:
    path = Path(path)
    raw_bytes = _require_path(path, "config file").read_bytes()
    data = yaml.safe_load(raw_bytes) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    base = path.parent

    datasets = {}
    for name, entry in (data.get("datasets") or {}).items():
        entry = entry or {}
        if "graphs" not in entry:
            raise ConfigError(f"dataset '{name}': missing 'graphs' path")
        graphs = _require_path(base / entry["graphs"], f"dataset '{name}' graphs file")
        datasets[name] = DatasetConfig(
            name=str(name),
            graphs=graphs,
            schema=entry.get("schema"),
            categories=[str(c) for c in entry.get("categories", [])],
            question_key=entry.get("question_key"),
        )

    embed = data.get("embed") or {}
    backend = str(embed.get("backend", "hash:16"))
    if backend != "url" and not backend.startswith("hash:"):
        raise ConfigError(f"embed.backend must be 'url' or 'hash:<dim>', got '{backend}'")
    if backend.startswith("hash:"):
        try:
            dim = int(backend.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad hash backend spec '{backend}'") from None
        if dim < 1:
            raise ConfigError("hash backend dim must be >= 1")
    batch_size = int(embed.get("batch_size", 32))
    if batch_size < 1:
        raise ConfigError("embed.batch_size must be >= 1")

    subgraph = data.get("subgraph") or {}
    max_nodes = int(subgraph.get("max_nodes", 11))
    hops = int(subgraph.get("hops", 1))
    if max_nodes < 2:
        raise ConfigError("subgraph.max_nodes must be >= 2")
    if hops < 1:
        raise ConfigError("subgraph.hops must be >= 1")

    split = data.get("split") or {}
    ratios = tuple(float(r) for r in split.get("link_ratios", DEFAULT_LINK_RATIOS))
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9 or any(r < 0 for r in ratios):
        raise ConfigError(f"split.link_ratios must be 3 non-negatives summing to 1, got {ratios}")
    train_frac = float(split.get("graph_train_frac", 0.8))
    if not (0.0 < train_frac < 1.0):
        raise ConfigError("split.graph_train_frac must be in (0, 1)")

    schemas_dir = data.get("schemas_dir")
    if schemas_dir is not None:
        schemas_dir = _require_path(base / schemas_dir, "schemas_dir")
    templates = data.get("templates")
    if templates is not None:
        templates = _require_path(base / templates, "templates file")

    return PipelineConfig(
        datasets=datasets,
        out_dir=base / data.get("out_dir", "out"),
        schemas_dir=schemas_dir,
        templates=templates,
        embed_backend=backend,
        embed_url=embed.get("url"),
        embed_batch_size=batch_size,
        seed=int(data.get("seed", 0)),
        max_nodes=max_nodes,
        hops=hops,
        link_ratios=ratios,
        graph_train_frac=train_frac,
        config_hash=hashlib.sha256(raw_bytes).hexdigest()[:12],
    )
