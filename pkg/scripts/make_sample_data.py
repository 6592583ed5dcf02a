#!/usr/bin/env python3
"""Generate the small synthetic datasets under sample_data/.

Deterministic, so the committed files can be regenerated verbatim.
"""

import json
import random
from pathlib import Path

TOPICS = ["Theory", "Systems", "Learning"]
WORDS = (
    "sparse dense layered adaptive spectral robust streaming distributed "
    "latent causal modular compact recursive parallel probabilistic"
).split()
NOUNS = "indexing routing caching clustering ranking matching scheduling sampling".split()


def citation_dataset(rng: random.Random, n=30):
    nodes = []
    for i in range(n):
        topic = TOPICS[i % len(TOPICS)]
        title = f"{rng.choice(WORDS).title()} {rng.choice(NOUNS)} for {rng.choice(NOUNS)}"
        abstract = (
            f"We study {rng.choice(WORDS)} {rng.choice(NOUNS)} under "
            f"{rng.choice(WORDS)} workloads and report {rng.randint(2, 9)} findings."
        )
        split = "train" if i % 5 < 3 else ("valid" if i % 5 == 3 else "test")
        nodes.append(
            {"id": f"paper{i:03d}", "title": title, "abstract": abstract,
             "label": topic, "split": split}
        )
    edges = set()
    for i in range(1, n):
        edges.add((rng.randrange(i), i))  # connected backbone
    while len(edges) < 3 * n:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return {"graph_id": "citations", "nodes": nodes, "edges": sorted(edges)}


def molecule_dataset(rng: random.Random, count=12):
    graphs = []
    for k in range(count):
        n = rng.randint(3, 8)
        nodes = []
        edges = [(i, i + 1) for i in range(n - 1)]
        if n > 3 and rng.random() < 0.5:
            edges.append((0, n - 1))  # close a ring
        degree = [0] * n
        for u, v in edges:
            degree[u] += 1
            degree[v] += 1
        ring_members = set(range(n)) if (0, n - 1) in edges else set()
        for i in range(n):
            element = rng.choice([0, 0, 0, 1, 2])  # mostly carbon
            aromatic = 1 if i in ring_members and rng.random() < 0.7 else 0
            nodes.append({"id": f"m{k:02d}a{i}", "features": [element, aromatic, degree[i]]})
        graphs.append(
            {"graph_id": f"mol{k:02d}", "nodes": nodes, "edges": edges,
             "label": str(k % 2)}
        )
    return graphs


CONFIG = """\
datasets:
  citations:
    graphs: citations.jsonl
    categories: [Theory, Systems, Learning]
  molecules:
    graphs: molecules.jsonl
    schema: mutag
    question_key: mutag
embed:
  backend: hash:16
  batch_size: 32
seed: 7
subgraph:
  max_nodes: 11
  hops: 1
split:
  link_ratios: [0.85, 0.05, 0.10]
  graph_train_frac: 0.8
out_dir: out
"""


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "sample_data"
    out.mkdir(exist_ok=True)
    rng = random.Random(20240901)
    with open(out / "citations.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(citation_dataset(rng)) + "\n")
    with open(out / "molecules.jsonl", "w", encoding="utf-8") as fh:
        for record in molecule_dataset(rng):
            fh.write(json.dumps(record) + "\n")
    (out / "config.yaml").write_text(CONFIG, encoding="utf-8")
    print(f"sample data written to {out}")


if __name__ == "__main__":
    main()
