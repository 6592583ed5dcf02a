"""Graph representation descriptors: token grammar, render, parse.

A descriptor lists all nodes, then all edges:

    <|BON|> (<|NC|> i)*n <|EON|> <|BOE|> (<|EDGE|> i j)*m <|EOE|>

Node indices are 1-based and contiguous; every <|NC|> stands for one
node-concept reference, aligned by position with ``concept_refs``. The
total token count is always 4 + 2n + 3m.

Ordering rules: node tasks put the target at index 1; link tasks list the
first target's block before the second's and emit all edges internal to
the first block before any edge touching the second block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DescriptorError,
    IndexOutOfRange,
    NonContiguousNodeIndices,
    UnexpectedToken,
)
from .graph import Subgraph
from .rng import Splitmix64, derive_seed

BON = "<|BON|>"
NC = "<|NC|>"
EON = "<|EON|>"
BOE = "<|BOE|>"
EDGE = "<|EDGE|>"
EOE = "<|EOE|>"

NODE_TASK = "node"
LINK_TASK = "link"
GRAPH_TASK = "graph"

CANONICAL = "canonical"
RANDOM = "random"

_INDEX_RE = re.compile(r"^\d+$")


@dataclass(frozen=True)
class OrderingPolicy:
    """Task kind plus edge emission order (canonical-sorted or seeded-random)."""

    kind: str
    edge_order: str = CANONICAL

    def __post_init__(self):
        if self.kind not in (NODE_TASK, LINK_TASK, GRAPH_TASK):
            raise DescriptorError(f"unknown policy kind '{self.kind}'")
        if self.edge_order not in (CANONICAL, RANDOM):
            raise DescriptorError(f"unknown edge order '{self.edge_order}'")


@dataclass
class GraphDescriptor:
    """Token sequence plus the node-concept references it points at."""

    n: int
    edges: list[tuple[int, int]]  # emission order, each pair already i < j
    concept_refs: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 0:
            raise DescriptorError("node count cannot be negative")
        for i, j in self.edges:
            if not (1 <= i <= self.n) or not (1 <= j <= self.n):
                raise DescriptorError(f"edge ({i}, {j}) out of range 1..{self.n}")
        if self.concept_refs and len(self.concept_refs) != self.n:
            raise DescriptorError(
                f"{len(self.concept_refs)} concept refs for {self.n} nodes"
            )

    @property
    def m(self) -> int:
        return len(self.edges)

    def tokens(self) -> list:
        """Abstract token list; indices appear as ints, markers as literals."""
        out: list = [BON]
        for i in range(1, self.n + 1):
            out.extend((NC, i))
        out.append(EON)
        out.append(BOE)
        for i, j in self.edges:
            out.extend((EDGE, i, j))
        out.append(EOE)
        return out

    def same_structure(self, other: "GraphDescriptor") -> bool:
        """Equality modulo concept_refs (refs are not textual)."""
        return self.n == other.n and self.edges == other.edges


def token_length(d: GraphDescriptor) -> int:
    """Token count; asserts the 4 + 2n + 3m law as an internal consistency check."""
    count = len(d.tokens())
    expected = 4 + 2 * d.n + 3 * d.m
    if count != expected:
        raise DescriptorError(
            f"token count {count} violates 4+2n+3m = {expected} (n={d.n}, m={d.m})"
        )
    return count


def serialize_graph(
    sg: Subgraph,
    policy: OrderingPolicy,
    seed: int = 0,
) -> GraphDescriptor:
    """Serialize a subgraph under the policy's ordering rules.

    Nodes are emitted in subgraph order (extraction already placed targets
    where the policy expects them); the policy is checked against
    ``target_positions`` and a mismatch is an error, not a silent reorder.
    """
    targets = sg.target_positions
    if policy.kind == NODE_TASK:
        if len(targets) != 1:
            raise DescriptorError(f"node task needs 1 target, got {len(targets)}")
        if targets[0] != 1:
            raise DescriptorError(f"node task target must sit at index 1, got {targets[0]}")
    elif policy.kind == LINK_TASK:
        if len(targets) != 2:
            raise DescriptorError(f"link task needs 2 targets, got {len(targets)}")
        if targets[0] != 1:
            raise DescriptorError(f"link task first target must sit at index 1, got {targets[0]}")

    edges = [(i, j) if i < j else (j, i) for i, j in sg.edges]
    if policy.kind == LINK_TASK:
        v_pos = targets[1]
        u_block, v_block = [], []
        for e in edges:
            (u_block if e[0] < v_pos and e[1] < v_pos else v_block).append(e)
        parts = [sorted(u_block), sorted(v_block)]
    else:
        parts = [sorted(edges)]

    if policy.edge_order == RANDOM:
        stream = Splitmix64(derive_seed("edge-order", sg.parent_graph_id, seed))
        for part in parts:
            stream.shuffle(part)

    return GraphDescriptor(
        n=sg.n,
        edges=[e for part in parts for e in part],
        concept_refs=list(sg.node_ids),
    )


def render_text(d: GraphDescriptor, nc_literal: str = NC) -> str:
    """Tokens joined by single spaces; indices as decimal integers."""
    words = []
    for tok in d.tokens():
        if tok == NC:
            words.append(nc_literal)
        else:
            words.append(str(tok))
    return " ".join(words)


def parse_descriptor(text: str) -> GraphDescriptor:
    """Parse exactly the descriptor grammar; errors carry token positions.

    concept_refs come back empty: references are positional, not textual.
    """
    tokens = text.split()
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: str) -> None:
        nonlocal pos
        found = peek()
        if found != expected:
            raise UnexpectedToken(pos, "end of input" if found is None else found, expected)
        pos += 1

    def take_index(what: str) -> int:
        nonlocal pos
        found = peek()
        if found is None or not _INDEX_RE.match(found):
            raise UnexpectedToken(
                pos, "end of input" if found is None else found, what
            )
        pos += 1
        value = int(found)
        if value < 1:
            raise UnexpectedToken(pos - 1, found, f"{what} >= 1")
        return value

    take(BON)
    n = 0
    while peek() == NC:
        pos += 1
        idx_pos = pos
        idx = take_index("node index")
        if idx != n + 1:
            raise NonContiguousNodeIndices(idx_pos, idx, n + 1)
        n += 1
    take(EON)
    take(BOE)
    edges: list[tuple[int, int]] = []
    while peek() == EDGE:
        pos += 1
        i_pos = pos
        i = take_index("edge endpoint")
        j_pos = pos
        j = take_index("edge endpoint")
        if i > n:
            raise IndexOutOfRange(i_pos, i, n)
        if j > n:
            raise IndexOutOfRange(j_pos, j, n)
        edges.append((i, j))
    take(EOE)
    if pos != len(tokens):
        raise UnexpectedToken(pos, tokens[pos], "end of input")
    return GraphDescriptor(n=n, edges=edges)


def extract_descriptor(text: str) -> str:
    """The descriptor substring embedded in a longer query string."""
    start = text.find(BON)
    if start < 0:
        raise DescriptorError(f"no {BON} found in text")
    end = text.find(EOE, start)
    if end < 0:
        raise DescriptorError(f"no {EOE} found after {BON}")
    return text[start : end + len(EOE)]
