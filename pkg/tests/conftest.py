"""Shared fixtures and synthetic-graph factories."""

import json
import random
from pathlib import Path

import pytest

from nocl.graph import Graph, Node, NodePayload, normalize_edge

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "golden"


def text_graph(graph_id, n, edges, labels=None, splits=None, id_prefix="n"):
    """A TAG graph with zero-padded node ids so id-sorting matches index order."""
    width = len(str(max(n - 1, 1)))
    nodes = []
    for i in range(n):
        nodes.append(
            Node(
                node_id=f"{id_prefix}{i:0{width}d}",
                payload=NodePayload.from_text(f"node {i} of {graph_id}"),
                node_label=None if labels is None else labels[i],
                split=None if splits is None else splits[i],
            )
        )
    return Graph(
        graph_id=graph_id,
        nodes=nodes,
        edges=[normalize_edge(u, v) for u, v in edges],
    )


def star_graph(degree, graph_id="star"):
    """Center at index 0 with `degree` leaves."""
    return text_graph(graph_id, degree + 1, [(0, i) for i in range(1, degree + 1)])


def path_graph(n, graph_id="path"):
    return text_graph(graph_id, n, [(i, i + 1) for i in range(n - 1)])


def triangle_graph(graph_id="tri"):
    return text_graph(graph_id, 3, [(0, 1), (1, 2), (0, 2)])


def random_graph(rng: random.Random, n=None, graph_id=None, p=None):
    """Erdős–Rényi-style graph from a seeded python Random."""
    n = n if n is not None else rng.randint(1, 50)
    p = p if p is not None else rng.random()
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return text_graph(graph_id or f"rand{rng.randint(0, 10**9)}", n, edges)


def write_graphs_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


@pytest.fixture
def golden_hash_cases():
    with open(GOLDEN_DIR / "hash_embed_golden.json", "r", encoding="utf-8") as fh:
        return json.load(fh)["cases"]
