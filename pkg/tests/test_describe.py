import pytest

from nocl.describe import (
    FeatureSchema,
    FieldSpec,
    SchemaRegistry,
    TagFormat,
    builtin_schema,
    describe_dataset,
    describe_node,
    load_schema,
    read_descriptions,
    render_features,
    write_descriptions,
)
from nocl.errors import SchemaError, VocabCodeError
from nocl.graph import Graph, Node, NodePayload

from conftest import text_graph

MOLHIV_SKELETON = (
    "This atom is [atomic name]. It has a [chirality type]. "
    "Its formal charge is [formal charge number]. "
    "The radical electrons of this atom is [number of radical electrons]. "
    "Its hybridization type is [hybridization type]. "
    "It connects [number of hydrogen atoms] hydrogen atoms. "
    "This atom is part of an aromatic ring. This atom is part of a ring. "
    "Its degree is [node degree]."
)

MUTAG_SKELETON = (
    "This atom is [atomic name]. This atom is part of an aromatic ring. "
    "Its degree is [node degree]."
)


def feature_node(node_id, features, schema="mutag"):
    return Node(node_id, NodePayload.from_features(features, schema))


class TestGoldenTemplates:
    def test_molhiv_skeleton_char_for_char(self):
        assert builtin_schema("ogbg-molhiv").skeleton() == MOLHIV_SKELETON

    def test_mutag_skeleton_char_for_char(self):
        assert builtin_schema("mutag").skeleton() == MUTAG_SKELETON


class TestMutagRendering:
    def test_aromatic_carbon(self):
        node = feature_node("a", [0, 1, 2])
        desc = describe_node(node, builtin_schema("mutag"))
        assert desc.text == (
            "This atom is carbon. This atom is part of an aromatic ring. Its degree is 2."
        )

    def test_non_aromatic_clause_omitted(self):
        node = feature_node("a", [0, 0, 1])
        desc = describe_node(node, builtin_schema("mutag"))
        assert desc.text == "This atom is carbon. Its degree is 1."


class TestMolhivRendering:
    def test_full_example(self):
        # dims: atomic=carbon(5), chirality=CHI_UNSPECIFIED(0), degree=0,
        # charge=0, #H=4, radicals=0, hybridization=SP3(2), aromatic=0, ring=0
        node = feature_node("a", [5, 0, 0, 0, 4, 0, 2, 0, 0], schema="ogbg-molhiv")
        desc = describe_node(node, builtin_schema("ogbg-molhiv"))
        assert desc.text == (
            "This atom is carbon. It has a chirality of type CHI_UNSPECIFIED. "
            "Its formal charge is 0. The radical electrons of this atom is 0. "
            "Its hybridization type is SP3. It connects 4 hydrogen atoms. "
            "Its degree is 0."
        )

    def test_both_flags_true_order(self):
        node = feature_node("a", [5, 0, 2, 0, 1, 0, 1, 1, 1], schema="ogbg-molhiv")
        text = describe_node(node, builtin_schema("ogbg-molhiv")).text
        aromatic = text.index("part of an aromatic ring")
        ring = text.index("part of a ring.")
        assert aromatic < ring
        assert text.endswith("Its degree is 2.")

    @pytest.mark.parametrize("flags,expected_extra", [((0, 0), 0), ((1, 0), 1), ((1, 1), 2)])
    def test_sentence_count_is_unconditional_plus_true_flags(self, flags, expected_extra):
        features = [5, 0, 1, 0, 1, 0, 2, flags[0], flags[1]]
        node = feature_node("a", features, schema="ogbg-molhiv")
        text = describe_node(node, builtin_schema("ogbg-molhiv")).text
        assert text.count(".") == 7 + expected_extra


class TestErrors:
    def test_unmapped_vocab_code_names_field_and_code(self):
        node = feature_node("a", [99, 0, 1])
        with pytest.raises(VocabCodeError, match=r"atomic name.*99"):
            describe_node(node, builtin_schema("mutag"))

    def test_missing_schema(self):
        node = feature_node("a", [0, 0, 0])
        with pytest.raises(SchemaError, match="no schema"):
            describe_node(node, None)

    def test_schema_name_mismatch(self):
        node = feature_node("a", [0, 0, 0], schema="other")
        with pytest.raises(SchemaError, match="other"):
            describe_node(node, builtin_schema("mutag"))

    def test_unknown_builtin_lists_available(self):
        with pytest.raises(SchemaError, match="ogbg-molhiv, mutag"):
            builtin_schema("unknown")

    def test_wrong_feature_length(self):
        with pytest.raises(SchemaError, match="expects 3"):
            render_features(builtin_schema("mutag"), [0, 1])

    def test_vocab_kind_requires_map(self):
        with pytest.raises(SchemaError, match="vocab"):
            FieldSpec(index=0, name="f", kind="vocab", clause_template="x {}.")

    def test_flag_requires_emit_when_or_slot(self):
        with pytest.raises(SchemaError, match="flag"):
            FieldSpec(index=0, name="f", kind="flag", clause_template="fixed.")

    def test_clause_order_must_cover_fields(self):
        with pytest.raises(SchemaError, match="clause_order"):
            FeatureSchema(
                "s",
                [FieldSpec(0, "a", "integer", "v {}.")],
                clause_order=["a", "b"],
            )


class TestTagFormat:
    def test_title_and_abstract(self):
        node = Node("p", NodePayload.from_fields(title="T", abstract="A"))
        assert describe_node(node).text == "Title: T\nAbstract: A"

    def test_title_only_drops_abstract_line(self):
        node = Node("p", NodePayload.from_fields(title="T"))
        assert describe_node(node).text == "Title: T"

    def test_plain_text_passthrough(self):
        node = Node("p", NodePayload.from_text("raw contents"))
        assert describe_node(node).text == "raw contents"

    def test_custom_format(self):
        node = Node("p", NodePayload.from_fields(title="T", abstract="A"))
        fmt = TagFormat("{title} :: {abstract}")
        assert describe_node(node, tag_format=fmt).text == "T :: A"


class TestDescribeDataset:
    def test_order_stable_and_counts(self):
        graphs = [text_graph("g1", 3, []), text_graph("g2", 3, [])]
        descs = describe_dataset(graphs)
        assert len(descs) == 6
        assert [d.node_id for d in descs[:3]] == ["n0", "n1", "n2"]

    def test_empty_dataset(self):
        assert describe_dataset([]) == []

    def test_error_pinpoints_location(self):
        g = Graph("gX", [feature_node("bad", [99, 0, 1])], [])
        with pytest.raises(VocabCodeError, match="graph 'gX' node 0"):
            describe_dataset([g])

    def test_deterministic(self):
        g = text_graph("g", 4, [])
        assert describe_dataset([g]) == describe_dataset([g])


class TestSchemaFiles:
    def test_registry_loads_extra_dir(self, tmp_path):
        (tmp_path / "toy.yaml").write_text(
            "schema_name: toy\n"
            "fields:\n"
            "- {name: level, kind: integer, clause: 'Level {}.'}\n"
        )
        registry = SchemaRegistry(tmp_path)
        assert "toy" in registry.names()
        assert registry.get("toy").field_count == 1

    def test_load_schema_round_trip(self, tmp_path):
        path = tmp_path / "s.yaml"
        path.write_text(
            "schema_name: s\n"
            "fields:\n"
            "- {name: kindness, kind: vocab, clause: 'It is {}.', vocab: {0: low, 1: high}}\n"
        )
        schema = load_schema(path)
        assert render_features(schema, [1]) == "It is high."

    def test_registry_unknown_name(self):
        with pytest.raises(SchemaError, match="available"):
            SchemaRegistry().get("missing")


class TestDescriptionIO:
    def test_round_trip(self, tmp_path):
        g = text_graph("g", 3, [])
        descs = describe_dataset([g])
        path = tmp_path / "d.jsonl"
        write_descriptions(descs, path, header="test")
        assert read_descriptions(path) == descs
