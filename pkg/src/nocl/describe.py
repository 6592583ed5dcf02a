"""Render nodes into natural-language descriptions.

Text-attributed nodes pass their raw text through a configurable layout;
feature-attributed nodes are rendered clause by clause from a declarative
schema that maps feature dimensions to templates and vocabularies. The
shipped schemas live under ``nocl/schemas/`` and are plain YAML, so vocab
phrases and clause wording are editable without code changes.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .errors import NoclError, SchemaError, VocabCodeError
from .graph import Graph, Node

BUILTIN_SCHEMA_NAMES = ("ogbg-molhiv", "mutag")
DEFAULT_TAG_TEMPLATE = "Title: {title}\nAbstract: {abstract}"


@dataclass
class NodeDescription:
    node_id: str
    text: str

    def __post_init__(self):
        if not self.text:
            raise NoclError(f"node '{self.node_id}': description text is empty")


@dataclass
class TagFormat:
    """Line-oriented layout for text-attributed payloads.

    Each template line is emitted only when every placeholder on it has a
    value; if no line survives, the payload's field values are joined as-is
    (plain-text passthrough).
    """

    template: str = DEFAULT_TAG_TEMPLATE

    def render(self, fields: dict[str, str]) -> str:
        lines = []
        for line in self.template.split("\n"):
            names = [f for _, f, _, _ in string.Formatter().parse(line) if f]
            if names and all(name in fields for name in names):
                lines.append(line.format(**fields))
            elif not names and line:
                lines.append(line)
        if lines:
            return "\n".join(lines)
        return "\n".join(v for v in fields.values() if v)


@dataclass
class FieldSpec:
    """One feature dimension: where to read it and how to phrase it."""

    index: int
    name: str
    kind: str  # vocab | integer | flag
    clause_template: str
    vocab: dict[int, str] | None = None
    emit_when: bool | None = None  # flag kind: emit the clause when the value is truthy

    def __post_init__(self):
        slots = self.clause_template.count("{}")
        if self.kind == "vocab":
            if not self.vocab:
                raise SchemaError(f"field '{self.name}': vocab kind requires a vocab map")
            if slots != 1:
                raise SchemaError(f"field '{self.name}': vocab clause needs exactly one slot")
        elif self.kind == "integer":
            if slots != 1:
                raise SchemaError(f"field '{self.name}': integer clause needs exactly one slot")
        elif self.kind == "flag":
            if self.emit_when is None and slots != 1:
                raise SchemaError(
                    f"field '{self.name}': flag kind requires emit_when or an unconditional clause"
                )
        else:
            raise SchemaError(f"field '{self.name}': unknown kind '{self.kind}'")


@dataclass
class FeatureSchema:
    """Ordered field specs plus an optional clause (render) order.

    ``fields`` follow the feature vector's dimension order; ``clause_order``
    lists field names in sentence order when that differs (molhiv renders in
    prose-template order, not dimension order).
    """

    schema_name: str
    fields: list[FieldSpec]
    clause_order: list[str] | None = None

    def __post_init__(self):
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise SchemaError(f"schema '{self.schema_name}': duplicate field names")
        indices = sorted(f.index for f in self.fields)
        if indices != list(range(len(self.fields))):
            raise SchemaError(
                f"schema '{self.schema_name}': field indices must cover 0..{len(self.fields) - 1}"
            )
        if self.clause_order is not None:
            if sorted(self.clause_order) != sorted(names):
                raise SchemaError(
                    f"schema '{self.schema_name}': clause_order must list every field exactly once"
                )

    @property
    def field_count(self) -> int:
        return len(self.fields)

    def ordered_fields(self) -> list[FieldSpec]:
        if self.clause_order is None:
            return list(self.fields)
        by_name = {f.name: f for f in self.fields}
        return [by_name[name] for name in self.clause_order]

    def skeleton(self) -> str:
        """Template text with '[field name]' sentinels and all flags asserted."""
        clauses = []
        for spec in self.ordered_fields():
            if spec.kind == "flag" and spec.emit_when is not None:
                clauses.append(spec.clause_template)
            else:
                clauses.append(spec.clause_template.replace("{}", f"[{spec.name}]"))
        return " ".join(clauses)


def _format_number(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def render_features(schema: FeatureSchema, features: list[float]) -> str:
    """Clause-by-clause rendering in the schema's clause order."""
    if len(features) != schema.field_count:
        raise SchemaError(
            f"schema '{schema.schema_name}' expects {schema.field_count} features, "
            f"got {len(features)}"
        )
    clauses = []
    for spec in schema.ordered_fields():
        value = features[spec.index]
        if spec.kind == "vocab":
            code = int(value)
            if code not in spec.vocab:
                raise VocabCodeError(spec.name, code, schema.schema_name)
            clauses.append(spec.clause_template.replace("{}", spec.vocab[code]))
        elif spec.kind == "integer":
            clauses.append(spec.clause_template.replace("{}", _format_number(value)))
        else:  # flag
            if spec.emit_when is None:
                clauses.append(spec.clause_template.replace("{}", _format_number(value)))
            elif bool(value) == spec.emit_when:
                clauses.append(spec.clause_template)
    return " ".join(clauses)


def describe_node(
    node: Node,
    schema: FeatureSchema | None = None,
    tag_format: TagFormat | None = None,
) -> NodeDescription:
    """One node in, one description out; deterministic for fixed inputs."""
    payload = node.payload
    if payload.is_text:
        text = (tag_format or TagFormat()).render(payload.text_fields)
        return NodeDescription(node.node_id, text)
    if schema is None:
        raise SchemaError(f"node '{node.node_id}' has features but no schema was supplied")
    if schema.schema_name != payload.schema_name:
        raise SchemaError(
            f"node '{node.node_id}' declares schema '{payload.schema_name}' "
            f"but got '{schema.schema_name}'"
        )
    return NodeDescription(node.node_id, render_features(schema, payload.features))


def schema_from_dict(data: dict) -> FeatureSchema:
    try:
        name = data["schema_name"]
        raw_fields = data["fields"]
    except KeyError as exc:
        raise SchemaError(f"schema file missing key: {exc}") from exc
    fields_ = []
    for i, raw in enumerate(raw_fields):
        vocab = raw.get("vocab")
        if vocab is not None:
            vocab = {int(code): str(phrase) for code, phrase in vocab.items()}
        fields_.append(
            FieldSpec(
                index=int(raw.get("index", i)),
                name=str(raw["name"]),
                kind=str(raw["kind"]),
                clause_template=str(raw["clause"]),
                vocab=vocab,
                emit_when=raw.get("emit_when"),
            )
        )
    return FeatureSchema(
        schema_name=str(name),
        fields=fields_,
        clause_order=data.get("clause_order"),
    )


def load_schema(path) -> FeatureSchema:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: schema file must be a mapping")
    return schema_from_dict(data)


def builtin_schema(name: str) -> FeatureSchema:
    """One of the shipped schemas; unknown names list what is available."""
    if name not in BUILTIN_SCHEMA_NAMES:
        raise SchemaError(
            f"unknown schema '{name}'; available: {', '.join(BUILTIN_SCHEMA_NAMES)}"
        )
    ref = resources.files("nocl").joinpath("schemas", f"{name}.yaml")
    with ref.open("r", encoding="utf-8") as fh:
        return schema_from_dict(yaml.safe_load(fh))


class SchemaRegistry:
    """Builtin schemas plus any YAML files found in an optional directory."""

    def __init__(self, extra_dir=None):
        self._schemas: dict[str, FeatureSchema] = {}
        for name in BUILTIN_SCHEMA_NAMES:
            self._schemas[name] = builtin_schema(name)
        if extra_dir is not None:
            for path in sorted(Path(extra_dir).glob("*.yaml")):
                schema = load_schema(path)
                self._schemas[schema.schema_name] = schema

    def get(self, name: str) -> FeatureSchema:
        try:
            return self._schemas[name]
        except KeyError:
            raise SchemaError(
                f"unknown schema '{name}'; available: {', '.join(sorted(self._schemas))}"
            ) from None

    def names(self) -> list[str]:
        return sorted(self._schemas)


def describe_dataset(
    graphs: list[Graph],
    registry: SchemaRegistry | None = None,
    tag_format: TagFormat | None = None,
) -> list[NodeDescription]:
    """One description per node, ordered (graph position, node position)."""
    registry = registry or SchemaRegistry()
    out = []
    for g in graphs:
        for pos, node in enumerate(g.nodes):
            schema = None
            if not node.payload.is_text:
                schema = registry.get(node.payload.schema_name)
            try:
                out.append(describe_node(node, schema, tag_format))
            except NoclError as exc:
                exc.args = (f"graph '{g.graph_id}' node {pos} ('{node.node_id}'): {exc}",)
                raise
    return out


def write_descriptions(descs: list[NodeDescription], path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for d in descs:
            fh.write(json.dumps({"node_id": d.node_id, "text": d.text}, ensure_ascii=False))
            fh.write("\n")


def read_descriptions(path) -> list[NodeDescription]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
                out.append(NodeDescription(rec["node_id"], rec["text"]))
            except (json.JSONDecodeError, KeyError) as exc:
                raise NoclError(f"{path}:{lineno}: bad description record: {exc}") from exc
    return out
