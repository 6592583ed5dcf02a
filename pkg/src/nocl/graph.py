"""In-memory graph model, validation, and induced-subgraph extraction.

Graphs are undirected, node-attributed (raw text or a numeric feature
vector per node), and immutable once loaded. Edges are normalized at
ingest to (smaller index, larger index) and each undirected edge is
stored once. Node- and link-level task construction cuts 1-hop induced
subgraphs around targets, capped at ``max_nodes`` (default 11) with
seeded neighbor sampling when the neighborhood overflows the budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GraphFormatError, UnknownNodeError
from .rng import Splitmix64, derive_seed

DEFAULT_MAX_NODES = 11


@dataclass
class NodePayload:
    """Exactly one of raw text fields (TAG) or a feature vector (non-TAG).

    TAG payloads keep a dict of named text fields ({"title": ..., "abstract":
    ...} for citation graphs, or {"text": ...} for plain passthrough text).
    """

    text_fields: dict[str, str] | None = None
    features: list[float] | None = None
    schema_name: str | None = None

    def __post_init__(self):
        if (self.text_fields is None) == (self.features is None):
            raise GraphFormatError("payload must have exactly one of text or features")

    @classmethod
    def from_text(cls, text: str) -> "NodePayload":
        return cls(text_fields={"text": text})

    @classmethod
    def from_fields(cls, **fields_: str) -> "NodePayload":
        return cls(text_fields=dict(fields_))

    @classmethod
    def from_features(cls, features: list[float], schema_name: str) -> "NodePayload":
        return cls(features=list(features), schema_name=schema_name)

    @property
    def is_text(self) -> bool:
        return self.text_fields is not None


@dataclass
class Node:
    node_id: str
    payload: NodePayload
    node_label: str | None = None
    split: str | None = None  # train | valid | test


@dataclass
class Graph:
    graph_id: str
    nodes: list[Node]
    edges: list[tuple[int, int]]  # 0-based node positions, normalized u < v
    graph_label: str | None = None
    _adj: dict[int, list[int]] | None = field(default=None, repr=False, compare=False)
    _id_index: dict[str, int] | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def node_index(self, node_id: str) -> int:
        if self._id_index is None:
            self._id_index = {node.node_id: i for i, node in enumerate(self.nodes)}
        try:
            return self._id_index[node_id]
        except KeyError:
            raise UnknownNodeError(node_id, self.graph_id) from None

    def adjacency(self) -> dict[int, list[int]]:
        """Neighbor lists by node position; built once, then cached."""
        if self._adj is None:
            adj: dict[int, list[int]] = {i: [] for i in range(self.n)}
            for u, v in self.edges:
                if 0 <= u < self.n and 0 <= v < self.n and u != v:
                    adj[u].append(v)
                    adj[v].append(u)
            self._adj = {i: sorted(set(neigh)) for i, neigh in adj.items()}
        return self._adj

    def edge_set(self) -> set[tuple[int, int]]:
        return {normalize_edge(u, v) for u, v in self.edges}


@dataclass
class Subgraph:
    """An extracted subgraph; node positions are 1-based local indices."""

    parent_graph_id: str
    node_ids: list[str]
    edges: list[tuple[int, int]]  # 1-based local indices, normalized i < j
    target_positions: list[int]

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass
class Violation:
    kind: str
    message: str


@dataclass
class ValidationReport:
    graph_id: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str) -> None:
        self.violations.append(Violation(kind, message))

    def __str__(self) -> str:
        if self.ok:
            return f"graph '{self.graph_id}': ok"
        lines = [f"graph '{self.graph_id}': {len(self.violations)} violation(s)"]
        lines += [f"  [{v.kind}] {v.message}" for v in self.violations]
        return "\n".join(lines)


def normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def validate_graph(g: Graph) -> ValidationReport:
    """Report every invariant violation; never raises on bad data."""
    report = ValidationReport(g.graph_id)
    if g.n < 1:
        report.add("empty", "graph has no nodes")
    seen_ids: dict[str, int] = {}
    for i, node in enumerate(g.nodes):
        if node.node_id in seen_ids:
            report.add(
                "duplicate-node-id",
                f"node_id '{node.node_id}' at positions {seen_ids[node.node_id]} and {i}",
            )
        else:
            seen_ids[node.node_id] = i
    seen_edges: set[tuple[int, int]] = set()
    for pos, (u, v) in enumerate(g.edges):
        if not (0 <= u < g.n) or not (0 <= v < g.n):
            report.add("edge-out-of-bounds", f"edge {pos} = ({u}, {v}) references a missing node")
            continue
        if u == v:
            report.add("self-loop", f"edge {pos} = ({u}, {v}) is a self-loop")
            continue
        key = normalize_edge(u, v)
        if key in seen_edges:
            report.add("duplicate-edge", f"edge {pos} = ({u}, {v}) duplicates {key}")
        seen_edges.add(key)
    return report


def _restrict_edges(g: Graph, retained: list[int]) -> list[tuple[int, int]]:
    """Edges of g with both endpoints retained, as 1-based local pairs."""
    local = {orig: i + 1 for i, orig in enumerate(retained)}
    keep = set(retained)
    out = set()
    for u, v in g.edges:
        if u in keep and v in keep:
            out.add(normalize_edge(local[u], local[v]))
    return sorted(out)


def _grow_neighborhood(
    g: Graph,
    center_idx: int,
    hops: int,
    max_nodes: int,
    stream: Splitmix64,
    excluded: set[int],
) -> list[int]:
    """Center-first node positions of the hop-limited, budget-capped neighborhood.

    Each hop layer is taken whole while it fits the remaining budget and
    sampled without replacement when it does not. Within a layer, nodes are
    ordered by node_id so the listing is deterministic.
    """
    adj = g.adjacency()
    retained = [center_idx]
    included = {center_idx} | set(excluded)
    frontier = [center_idx]
    budget = max_nodes - 1
    for _ in range(hops):
        if budget <= 0 or not frontier:
            break
        layer = sorted(
            {nb for node in frontier for nb in adj[node] if nb not in included},
            key=lambda i: g.nodes[i].node_id,
        )
        if not layer:
            break
        if len(layer) > budget:
            layer = sorted(stream.sample(layer, budget), key=lambda i: g.nodes[i].node_id)
        retained.extend(layer)
        included.update(layer)
        frontier = layer
        budget -= len(layer)
    return retained


def induced_subgraph(
    g: Graph,
    center: str,
    hops: int = 1,
    max_nodes: int = DEFAULT_MAX_NODES,
    seed: int = 0,
) -> Subgraph:
    """Induced subgraph around ``center``, which lands at local index 1.

    Keeps at most ``max_nodes`` nodes; when a hop layer overflows the
    remaining budget its members are sampled without replacement from a
    stream seeded by (graph_id, center, seed). Deterministic for fixed
    inputs.
    """
    if hops < 1:
        raise ValueError("hops must be >= 1")
    if max_nodes < 2:
        raise ValueError("max_nodes must be >= 2")
    center_idx = g.node_index(center)
    stream = Splitmix64(derive_seed(g.graph_id, center, seed))
    retained = _grow_neighborhood(g, center_idx, hops, max_nodes, stream, excluded=set())
    return Subgraph(
        parent_graph_id=g.graph_id,
        node_ids=[g.nodes[i].node_id for i in retained],
        edges=_restrict_edges(g, retained),
        target_positions=[1],
    )


def pair_induced_subgraph(
    g: Graph,
    u: str,
    v: str,
    hops: int = 1,
    max_nodes_each: int = DEFAULT_MAX_NODES,
    seed: int = 0,
) -> Subgraph:
    """Union of the two targets' induced subgraphs, u-block first.

    Local ordering is [u, u's retained neighborhood..., v, v's retained
    neighborhood...]; a node reached from both sides keeps its u-side index
    and is not re-listed. Each target is excluded from the other's
    neighborhood, so the (u, v) edge itself can never enter the edge list.
    The edge set is the union of the edges induced by each side's node set.
    """
    if u == v:
        raise ValueError(f"pair targets must differ (got '{u}' twice)")
    u_idx = g.node_index(u)
    v_idx = g.node_index(v)
    u_stream = Splitmix64(derive_seed(g.graph_id, u, seed))
    v_stream = Splitmix64(derive_seed(g.graph_id, v, seed))
    u_side = _grow_neighborhood(g, u_idx, hops, max_nodes_each, u_stream, excluded={v_idx})
    v_side = _grow_neighborhood(g, v_idx, hops, max_nodes_each, v_stream, excluded={u_idx})

    listing = list(u_side)
    listed = set(u_side)
    listing.append(v_idx)
    listed.add(v_idx)
    for idx in v_side[1:]:
        if idx not in listed:
            listing.append(idx)
            listed.add(idx)

    local = {orig: i + 1 for i, orig in enumerate(listing)}
    u_set, v_set = set(u_side), set(v_side)
    edges = set()
    for a, b in g.edges:
        if (a in u_set and b in u_set) or (a in v_set and b in v_set):
            edges.add(normalize_edge(local[a], local[b]))
    return Subgraph(
        parent_graph_id=g.graph_id,
        node_ids=[g.nodes[i].node_id for i in listing],
        edges=sorted(edges),
        target_positions=[1, local[v_idx]],
    )


def whole_graph_subgraph(g: Graph) -> Subgraph:
    """The entire graph as a Subgraph (graph-level tasks are not capped)."""
    return Subgraph(
        parent_graph_id=g.graph_id,
        node_ids=[node.node_id for node in g.nodes],
        edges=sorted({normalize_edge(u + 1, v + 1) for u, v in g.edges}),
        target_positions=[],
    )


def _parse_node(record: dict, schema_name: str | None, graph_id: str, pos: int) -> Node:
    where = f"graph '{graph_id}' node {pos}"
    if "id" not in record:
        raise GraphFormatError(f"{where}: missing 'id'")
    node_id = str(record["id"])
    has_text = "text" in record or "title" in record or "abstract" in record
    has_features = "features" in record
    if has_text == has_features:
        raise GraphFormatError(f"{where}: need exactly one of text/title/abstract or features")
    if has_features:
        if schema_name is None:
            raise GraphFormatError(f"{where}: feature payload but no schema name given at ingest")
        payload = NodePayload.from_features(record["features"], schema_name)
    else:
        fields_: dict[str, str] = {}
        text = record.get("text")
        if isinstance(text, dict):
            fields_.update({str(k): str(val) for k, val in text.items()})
        elif text is not None:
            fields_["text"] = str(text)
        for key in ("title", "abstract"):
            if key in record:
                fields_[key] = str(record[key])
        payload = NodePayload(text_fields=fields_)
    label = record.get("label")
    split = record.get("split")
    if split is not None and split not in ("train", "valid", "test"):
        raise GraphFormatError(f"{where}: split must be train/valid/test, got {split!r}")
    return Node(
        node_id=node_id,
        payload=payload,
        node_label=None if label is None else str(label),
        split=split,
    )


def graph_from_record(record: dict, schema_name: str | None = None) -> Graph:
    """Build a Graph from one ingest record; edge indices are 0-based positions."""
    if "graph_id" not in record:
        raise GraphFormatError("record missing 'graph_id'")
    graph_id = str(record["graph_id"])
    nodes = [
        _parse_node(nrec, schema_name, graph_id, i)
        for i, nrec in enumerate(record.get("nodes", []))
    ]
    edges = []
    for erec in record.get("edges", []):
        if len(erec) != 2:
            raise GraphFormatError(f"graph '{graph_id}': edge {erec!r} is not a pair")
        edges.append(normalize_edge(int(erec[0]), int(erec[1])))
    label = record.get("label")
    return Graph(
        graph_id=graph_id,
        nodes=nodes,
        edges=edges,
        graph_label=None if label is None else str(label),
    )


def load_graphs(path, schema_name: str | None = None) -> list[Graph]:
    """Read line-delimited graph records; '#'-prefixed lines are skipped."""
    graphs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                graphs.append(graph_from_record(record, schema_name))
            except GraphFormatError as exc:
                raise GraphFormatError(f"{path}:{lineno}: {exc}") from exc
    return graphs
