"""Graph-instruction compiler: node descriptions, concept embedding stores,
graph descriptor sequences, and instruction-tuning corpora, plus evaluation
and token-budget tooling."""

__version__ = "0.1.0"

from .graph import (  # noqa: F401
    Graph,
    Node,
    NodePayload,
    Subgraph,
    induced_subgraph,
    load_graphs,
    pair_induced_subgraph,
    validate_graph,
    whole_graph_subgraph,
)
from .describe import (  # noqa: F401
    FeatureSchema,
    FieldSpec,
    NodeDescription,
    SchemaRegistry,
    TagFormat,
    builtin_schema,
    describe_dataset,
    describe_node,
)
from .concept import (  # noqa: F401
    EmbeddingStore,
    HashEmbeddingBackend,
    HttpEmbeddingBackend,
    embed_descriptions,
    hash_embed,
    read_store,
    write_store,
)
from .descriptor import (  # noqa: F401
    GraphDescriptor,
    OrderingPolicy,
    parse_descriptor,
    render_text,
    serialize_graph,
    token_length,
)
from .taskgen import (  # noqa: F401
    CategorySet,
    InstructionExample,
    LinkSplit,
    PromptTemplates,
    gen_connector_corpus,
    gen_edge_check,
    gen_graph_classification,
    gen_link_prediction,
    gen_node_classification,
    gen_node_counting,
    read_corpus,
    split_graphs,
    split_links,
    validate_corpus,
    write_corpus,
)
from .scoring import (  # noqa: F401
    MetricsReport,
    PredictionRecord,
    accuracy,
    normalize_response,
    parse_link_response,
    roc_auc,
    score_run,
)
from .budget import (  # noqa: F401
    BudgetStats,
    VocabTokenizer,
    WhitespaceTokenizer,
    count_question_tokens,
    dataset_stats,
)
