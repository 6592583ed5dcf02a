"""Compile graphs into instruction corpora.

Every example is a single-turn query/response record. Graph-structured
tasks embed a rendered descriptor in the query ("This is a graph: ...");
connector-tuning conversations instead carry a single <|NC|> placeholder.
Splits and negative links are sampled deterministically from seeded
streams, so the same inputs and seeds always produce the same corpus.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources

import yaml

from .concept import EmbeddingStore
from .describe import NodeDescription
from .descriptor import (
    CANONICAL,
    GRAPH_TASK,
    LINK_TASK,
    NC,
    NODE_TASK,
    OrderingPolicy,
    extract_descriptor,
    parse_descriptor,
    render_text,
    serialize_graph,
)
from .errors import (
    CorpusFormatError,
    DensityError,
    LeakageError,
    NoclError,
)
from .graph import Graph, Node, Subgraph, normalize_edge, whole_graph_subgraph
from .rng import Splitmix64, derive_seed

log = logging.getLogger(__name__)

NODE_CLS = "NodeCls"
LINK_PRED = "LinkPred"
GRAPH_CLS = "GraphCls"
NODE_COUNT = "NodeCount"
EDGE_CHECK = "EdgeCheck"
CONNECTOR_TUNE = "ConnectorTune"
TASKS = (NODE_CLS, LINK_PRED, GRAPH_CLS, NODE_COUNT, EDGE_CHECK, CONNECTOR_TUNE)

SPLITS = ("train", "valid", "test")
DEFAULT_LINK_RATIOS = (0.85, 0.05, 0.10)
NEGATIVE_ATTEMPT_FACTOR = 100

_CORPUS_FIELDS = (
    "example_id",
    "dataset",
    "task",
    "query",
    "response",
    "concept_refs",
    "split",
    "gold_label",
)


class PromptTemplates:
    """Question/prompt phrasings, loaded from a YAML template file."""

    def __init__(self, data: dict):
        self._data = dict(data)

    @classmethod
    def builtin(cls) -> "PromptTemplates":
        ref = resources.files("nocl").joinpath("templates", "prompts.yaml")
        with ref.open("r", encoding="utf-8") as fh:
            return cls(yaml.safe_load(fh))

    @classmethod
    def load(cls, path) -> "PromptTemplates":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise NoclError(f"{path}: template file must be a mapping")
        return cls(data)

    def text(self, key: str, **kw) -> str:
        try:
            template = self._data[key]
        except KeyError:
            raise NoclError(f"template file has no entry '{key}'") from None
        return template.format(**kw)

    def graph_question(self, key: str) -> tuple[str, str]:
        questions = self._data.get("graph_questions", {})
        if key not in questions:
            raise NoclError(
                f"no graph question registered under '{key}'; "
                f"available: {', '.join(sorted(questions)) or '(none)'}"
            )
        entry = questions[key]
        return str(entry["question"]), str(entry["positive_label"])


@dataclass
class CategorySet:
    dataset: str
    categories: list[str]

    def __post_init__(self):
        if not self.categories:
            raise NoclError(f"category set for '{self.dataset}' is empty")
        if len(set(self.categories)) != len(self.categories):
            raise NoclError(f"category set for '{self.dataset}' has duplicates")


@dataclass
class InstructionExample:
    example_id: str
    dataset: str
    task: str
    query: str
    response: str
    concept_refs: list[str]
    split: str
    gold_label: str

    def __post_init__(self):
        if self.task not in TASKS:
            raise CorpusFormatError(f"unknown task tag '{self.task}'")
        if self.split not in SPLITS:
            raise CorpusFormatError(f"unknown split '{self.split}'")
        if not self.response:
            raise CorpusFormatError(f"example '{self.example_id}': empty response")
        nc_count = self.query.count(NC)
        if nc_count != len(self.concept_refs):
            raise CorpusFormatError(
                f"example '{self.example_id}': {nc_count} {NC} occurrences "
                f"but {len(self.concept_refs)} concept refs"
            )

    def to_record(self) -> dict:
        return {name: getattr(self, name) for name in _CORPUS_FIELDS}

    @classmethod
    def from_record(cls, record: dict) -> "InstructionExample":
        missing = [name for name in _CORPUS_FIELDS if name not in record]
        if missing:
            raise CorpusFormatError(f"record missing fields: {', '.join(missing)}")
        return cls(**{name: record[name] for name in _CORPUS_FIELDS})


@dataclass
class LinkSplit:
    train: list[tuple[str, str, str]] = field(default_factory=list)
    valid: list[tuple[str, str, str]] = field(default_factory=list)
    test: list[tuple[str, str, str]] = field(default_factory=list)

    def part(self, split: str) -> list[tuple[str, str, str]]:
        return getattr(self, split)


def _require_in_store(store: EmbeddingStore, node_ids: list[str]) -> None:
    missing = [nid for nid in node_ids if nid not in store]
    if missing:
        raise NoclError(f"nodes missing from embedding store: {missing[:5]}")


def _graph_query(desc_text: str, task_query: str, templates: PromptTemplates) -> str:
    return templates.text("query_prefix", descriptor=desc_text) + task_query


def gen_node_classification(
    sg: Subgraph,
    store: EmbeddingStore,
    cats: CategorySet,
    gold_label: str,
    split: str = "train",
    templates: PromptTemplates | None = None,
    edge_order: str = CANONICAL,
    seed: int = 0,
) -> InstructionExample:
    """Classify the target node (always local index 1) among the categories."""
    templates = templates or PromptTemplates.builtin()
    _require_in_store(store, sg.node_ids)
    if gold_label not in cats.categories:
        raise NoclError(
            f"gold label '{gold_label}' not among categories of '{cats.dataset}'"
        )
    d = serialize_graph(sg, OrderingPolicy(NODE_TASK, edge_order), seed)
    question = templates.text(
        "node_cls", index=sg.target_positions[0], categories=", ".join(cats.categories)
    )
    return InstructionExample(
        example_id=f"{cats.dataset}:{NODE_CLS}:{sg.node_ids[0]}",
        dataset=cats.dataset,
        task=NODE_CLS,
        query=_graph_query(render_text(d), question, templates),
        response=gold_label,
        concept_refs=d.concept_refs,
        split=split,
        gold_label=gold_label,
    )


def gen_link_prediction(
    psg: Subgraph,
    store: EmbeddingStore,
    is_positive: bool,
    dataset: str = "",
    split: str = "train",
    templates: PromptTemplates | None = None,
    edge_order: str = CANONICAL,
    seed: int = 0,
) -> InstructionExample:
    """Should the two targets connect? The queried edge is never emitted."""
    templates = templates or PromptTemplates.builtin()
    if len(psg.target_positions) != 2:
        raise NoclError(f"link prediction needs 2 targets, got {len(psg.target_positions)}")
    _require_in_store(store, psg.node_ids)
    d = serialize_graph(psg, OrderingPolicy(LINK_TASK, edge_order), seed)
    i, j = psg.target_positions
    if normalize_edge(i, j) in {normalize_edge(a, b) for a, b in d.edges}:
        raise LeakageError(
            f"descriptor contains the queried edge ({i}, {j}); "
            "the pair under prediction must not be emitted"
        )
    u_id, v_id = psg.node_ids[i - 1], psg.node_ids[j - 1]
    kind = "pos" if is_positive else "neg"
    response = templates.text("link_pred_yes" if is_positive else "link_pred_no")
    return InstructionExample(
        example_id=f"{dataset}:{LINK_PRED}:{split}:{u_id}~{v_id}:{kind}",
        dataset=dataset,
        task=LINK_PRED,
        query=_graph_query(render_text(d), templates.text("link_pred", i=i, j=j), templates),
        response=response,
        concept_refs=d.concept_refs,
        split=split,
        gold_label=kind,
    )


def gen_graph_classification(
    g: Graph,
    store: EmbeddingStore,
    question_key: str,
    dataset: str = "",
    split: str = "train",
    templates: PromptTemplates | None = None,
    edge_order: str = CANONICAL,
    seed: int = 0,
) -> InstructionExample:
    """Whole-graph yes/no property question; no subgraph cap applies."""
    templates = templates or PromptTemplates.builtin()
    question, positive_label = templates.graph_question(question_key)
    if g.graph_label is None:
        raise NoclError(f"graph '{g.graph_id}' has no label")
    sg = whole_graph_subgraph(g)
    _require_in_store(store, sg.node_ids)
    d = serialize_graph(sg, OrderingPolicy(GRAPH_TASK, edge_order), seed)
    yes = g.graph_label == positive_label
    return InstructionExample(
        example_id=f"{dataset}:{GRAPH_CLS}:{g.graph_id}",
        dataset=dataset,
        task=GRAPH_CLS,
        query=_graph_query(render_text(d), question, templates),
        response=templates.text("yes_response" if yes else "no_response"),
        concept_refs=d.concept_refs,
        split=split,
        gold_label=g.graph_label,
    )


def _aux_policy(sg: Subgraph, edge_order: str) -> OrderingPolicy:
    kinds = {1: NODE_TASK, 2: LINK_TASK}
    return OrderingPolicy(kinds.get(len(sg.target_positions), GRAPH_TASK), edge_order)


def gen_node_counting(
    sg: Subgraph,
    store: EmbeddingStore,
    seed: int = 0,
    dataset: str = "",
    split: str = "train",
    templates: PromptTemplates | None = None,
    edge_order: str = CANONICAL,
) -> InstructionExample:
    """Auxiliary task: the answer is the node count, recomputable from the query."""
    templates = templates or PromptTemplates.builtin()
    _require_in_store(store, sg.node_ids)
    d = serialize_graph(sg, _aux_policy(sg, edge_order), seed)
    return InstructionExample(
        example_id=f"{dataset}:{NODE_COUNT}:{sg.node_ids[0]}",
        dataset=dataset,
        task=NODE_COUNT,
        query=_graph_query(render_text(d), templates.text("node_count"), templates),
        response=str(sg.n),
        concept_refs=d.concept_refs,
        split=split,
        gold_label=str(sg.n),
    )


def gen_edge_check(
    sg: Subgraph,
    store: EmbeddingStore,
    seed: int = 0,
    dataset: str = "",
    split: str = "train",
    templates: PromptTemplates | None = None,
    edge_order: str = CANONICAL,
) -> InstructionExample:
    """Auxiliary task: is there an edge between a sampled node pair?

    Present and absent pairs are drawn with equal probability; when one pool
    is empty (complete or edgeless graph) the other is used and the fallback
    is logged.
    """
    templates = templates or PromptTemplates.builtin()
    if sg.n < 2:
        raise NoclError(f"edge check needs at least 2 nodes, got {sg.n}")
    _require_in_store(store, sg.node_ids)
    d = serialize_graph(sg, _aux_policy(sg, edge_order), seed)
    present = sorted({normalize_edge(i, j) for i, j in d.edges})
    all_pairs = [(i, j) for i in range(1, sg.n + 1) for j in range(i + 1, sg.n + 1)]
    absent = sorted(set(all_pairs) - set(present))

    stream = Splitmix64(derive_seed("edge-check", dataset, sg.parent_graph_id, sg.node_ids[0], seed))
    want_present = stream.next_below(2) == 1
    pool = present if want_present else absent
    if not pool:
        pool = absent if want_present else present
        log.warning(
            "edge check on '%s': no %s pair available, falling back",
            sg.parent_graph_id,
            "present" if want_present else "absent",
        )
        want_present = not want_present
    i, j = stream.choice(pool)
    return InstructionExample(
        example_id=f"{dataset}:{EDGE_CHECK}:{sg.node_ids[0]}",
        dataset=dataset,
        task=EDGE_CHECK,
        query=_graph_query(
            render_text(d), templates.text("edge_check", i=i, j=j), templates
        ),
        response=templates.text("yes_response" if want_present else "no_response"),
        concept_refs=d.concept_refs,
        split=split,
        gold_label="yes" if want_present else "no",
    )


def gen_connector_corpus(
    node: Node,
    desc: NodeDescription,
    cats: CategorySet | None = None,
    dataset: str = "",
    templates: PromptTemplates | None = None,
) -> list[InstructionExample]:
    """Connector-tuning conversations for one node.

    Text-attributed nodes yield up to three: title recovery, abstract
    recovery, and (training-split nodes only) class prediction. Feature
    nodes, and text nodes without title/abstract parts, yield a single
    description-reconstruction conversation.
    """
    templates = templates or PromptTemplates.builtin()
    split = node.split or "train"
    base_id = f"{dataset}:{CONNECTOR_TUNE}:{node.node_id}"

    def make(variant: str, query: str, response: str, gold: str = "") -> InstructionExample:
        return InstructionExample(
            example_id=f"{base_id}:{variant}",
            dataset=dataset,
            task=CONNECTOR_TUNE,
            query=query,
            response=response,
            concept_refs=[node.node_id],
            split=split,
            gold_label=gold,
        )

    reconstruct = make(
        "reconstruct", templates.text("connector_reconstruct", nc=NC), desc.text
    )
    if not node.payload.is_text:
        return [reconstruct]

    out: list[InstructionExample] = []
    fields_ = node.payload.text_fields
    for key in ("title", "abstract"):
        if fields_.get(key):
            out.append(make(key, templates.text(f"connector_{key}", nc=NC), fields_[key]))
    if cats is not None and node.node_label:
        if node.split == "train":
            query = templates.text(
                "connector_class", nc=NC, categories=", ".join(cats.categories)
            )
            out.append(make("class", query, node.node_label, gold=node.node_label))
        else:
            log.warning(
                "node '%s': class prediction skipped (split=%s, training set only)",
                node.node_id,
                node.split,
            )
    # a text node without recoverable parts still contributes a reconstruction
    return out or [reconstruct]


def split_links(
    g: Graph,
    ratios: tuple[float, float, float] = DEFAULT_LINK_RATIOS,
    seed: int = 0,
) -> LinkSplit:
    """Partition edges into train/valid/test and pair each split with negatives.

    The edge permutation and the negative draws come from one seeded stream.
    Train and valid take their floor share, test the remainder. Negatives are
    non-edges, unique, and disjoint across splits; a graph too dense to supply
    them raises with the shortfall.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be three non-negatives summing to 1, got {ratios}")
    m = len(g.edges)
    if m < 10:
        raise NoclError(f"graph '{g.graph_id}' has only {m} edges; need at least 10 to split")

    stream = Splitmix64(derive_seed("link-split", g.graph_id, seed))
    edges = sorted(g.edge_set())
    stream.shuffle(edges)
    # floor/remainder rule; epsilon guards against 118.999... style float error
    n_train = int(math.floor(ratios[0] * m + 1e-9))
    n_valid = int(math.floor(ratios[1] * m + 1e-9))
    parts = {
        "train": edges[:n_train],
        "valid": edges[n_train : n_train + n_valid],
        "test": edges[n_train + n_valid :],
    }

    edge_set = g.edge_set()
    taken: set[tuple[int, int]] = set()
    negatives: list[tuple[int, int]] = []
    attempts_left = NEGATIVE_ATTEMPT_FACTOR * m
    while len(negatives) < m and attempts_left > 0:
        attempts_left -= 1
        a = stream.next_below(g.n)
        b = stream.next_below(g.n)
        if a == b:
            continue
        pair = normalize_edge(a, b)
        if pair in edge_set or pair in taken:
            continue
        taken.add(pair)
        negatives.append(pair)
    if len(negatives) < m:
        raise DensityError(
            f"graph '{g.graph_id}': needed {m} negative links but found only "
            f"{len(negatives)} non-edges within the attempt budget"
        )

    result = LinkSplit()
    offset = 0
    for name in SPLITS:
        pos = parts[name]
        neg = negatives[offset : offset + len(pos)]
        offset += len(pos)
        entries = [(g.nodes[u].node_id, g.nodes[v].node_id, "pos") for u, v in pos]
        entries += [(g.nodes[u].node_id, g.nodes[v].node_id, "neg") for u, v in neg]
        result.part(name).extend(entries)
    return result


def split_graphs(
    graphs: list[Graph],
    train_frac: float = 0.8,
    seed: int = 0,
) -> dict[str, str]:
    """Seeded permutation; first floor(train_frac * N) graphs train, rest test."""
    if not (0.0 < train_frac < 1.0):
        raise ValueError(f"train_frac must be in (0, 1), got {train_frac}")
    ids = [g.graph_id for g in graphs]
    stream = Splitmix64(derive_seed("graph-split", seed))
    stream.shuffle(ids)
    n_train = int(math.floor(train_frac * len(ids) + 1e-9))
    if n_train == 0 and ids:
        log.warning("graph split: train fraction %.2f of %d graphs floors to 0", train_frac, len(ids))
    return {gid: ("train" if i < n_train else "test") for i, gid in enumerate(ids)}


def write_link_split(split: LinkSplit, path, header: str | None = None) -> None:
    payload = {name: [list(e) for e in split.part(name)] for name in SPLITS}
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write(json.dumps(payload, ensure_ascii=False, indent=1))
        fh.write("\n")


def read_link_split(path) -> LinkSplit:
    with open(path, "r", encoding="utf-8") as fh:
        text = "".join(line for line in fh if not line.startswith("#"))
    data = json.loads(text)
    split = LinkSplit()
    for name in SPLITS:
        for entry in data.get(name, []):
            u, v, label = entry
            if label not in ("pos", "neg"):
                raise CorpusFormatError(f"{path}: bad link label {label!r}")
            split.part(name).append((str(u), str(v), label))
    return split


def write_graph_split(tags: dict[str, str], path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write(json.dumps(tags, ensure_ascii=False, indent=1, sort_keys=True))
        fh.write("\n")


def read_graph_split(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = "".join(line for line in fh if not line.startswith("#"))
    return {str(k): str(v) for k, v in json.loads(text).items()}


def write_corpus(examples: list[InstructionExample], path, header: str | None = None) -> None:
    """Line-delimited records, sorted by example_id."""
    ordered = sorted(examples, key=lambda ex: ex.example_id)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for ex in ordered:
            fh.write(json.dumps(ex.to_record(), ensure_ascii=False))
            fh.write("\n")


def read_corpus(path) -> list[InstructionExample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc}", line=lineno) from exc
            try:
                out.append(InstructionExample.from_record(record))
            except CorpusFormatError as exc:
                raise CorpusFormatError(str(exc), line=lineno) from exc
    return out


def validate_corpus(examples: list[InstructionExample]) -> list[str]:
    """Read-back validation: structure, leakage, and self-verifying answers.

    Returns human-readable issue strings; an empty list means the corpus is
    internally consistent (an auditor can re-derive every auxiliary answer
    from the query text alone).
    """
    templates = PromptTemplates.builtin()
    yes = templates.text("yes_response")
    no = templates.text("no_response")
    link_yes = templates.text("link_pred_yes")
    link_no = templates.text("link_pred_no")
    issues = []
    for ex in examples:
        where = f"example '{ex.example_id}'"
        if ex.task == CONNECTOR_TUNE:
            continue
        try:
            d = parse_descriptor(extract_descriptor(ex.query))
        except NoclError as exc:
            issues.append(f"{where}: descriptor does not parse: {exc}")
            continue
        if len(ex.concept_refs) != d.n:
            issues.append(f"{where}: {len(ex.concept_refs)} refs for {d.n} descriptor nodes")
        edge_set = {normalize_edge(i, j) for i, j in d.edges}
        if ex.task == LINK_PRED:
            pair = _query_pair(ex.query, "Should node", "connect node")
            if pair is None:
                issues.append(f"{where}: cannot find queried pair in link query")
            elif normalize_edge(*pair) in edge_set:
                issues.append(f"{where}: leakage — queried pair {pair} present in descriptor")
            if ex.response not in (link_yes, link_no):
                issues.append(f"{where}: non-canonical link response {ex.response!r}")
        elif ex.task == NODE_COUNT:
            if ex.response != str(d.n):
                issues.append(f"{where}: response {ex.response!r} != node count {d.n}")
        elif ex.task == EDGE_CHECK:
            pair = _query_pair(ex.query, "between node", "and node")
            if pair is None:
                issues.append(f"{where}: cannot find queried pair in edge-check query")
            else:
                present = normalize_edge(*pair) in edge_set
                expected = yes if present else no
                if ex.response != expected:
                    issues.append(
                        f"{where}: response {ex.response!r} inconsistent with edge list "
                        f"(pair {pair} {'present' if present else 'absent'})"
                    )
    return issues


def _query_pair(query: str, first_marker: str, second_marker: str) -> tuple[int, int] | None:
    pattern = re.escape(first_marker) + r"\s+(\d+)\s+" + re.escape(second_marker) + r"\s+(\d+)"
    match = re.search(pattern, query)
    if not match:
        return None
    return int(match.group(1)), int(match.group(2))
