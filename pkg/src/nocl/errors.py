"""Exception types shared across the pipeline."""


class NoclError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(NoclError):
    """Malformed graph input record."""


class UnknownNodeError(NoclError, KeyError):
    """A node id was looked up that does not exist in the graph."""

    def __init__(self, node_id: str, graph_id: str = ""):
        self.node_id = node_id
        self.graph_id = graph_id
        where = f" in graph '{graph_id}'" if graph_id else ""
        super().__init__(f"unknown node id '{node_id}'{where}")


class SchemaError(NoclError):
    """Missing, unknown, or invalid feature schema."""


class VocabCodeError(SchemaError):
    """A feature code has no phrase in its field's vocabulary."""

    def __init__(self, field_name: str, code, schema_name: str = ""):
        self.field_name = field_name
        self.code = code
        where = f" (schema '{schema_name}')" if schema_name else ""
        super().__init__(f"field '{field_name}'{where} has no vocab entry for code {code!r}")


class BackendError(NoclError):
    """Embedding backend failed (after retries, where applicable)."""


class StoreFormatError(NoclError):
    """Embedding store file is corrupt or has an unexpected layout."""


class DescriptorError(NoclError):
    """Invalid descriptor construction or serialization request."""


class DescriptorParseError(NoclError):
    """Base for descriptor text parsing failures."""


class UnexpectedToken(DescriptorParseError):
    def __init__(self, position: int, found: str, expected: str):
        self.position = position
        self.found = found
        self.expected = expected
        super().__init__(f"position {position}: found {found!r}, expected {expected}")


class IndexOutOfRange(DescriptorParseError):
    def __init__(self, position: int, index: int, n: int):
        self.position = position
        self.index = index
        self.n = n
        super().__init__(f"position {position}: index {index} out of range 1..{n}")


class NonContiguousNodeIndices(DescriptorParseError):
    def __init__(self, position: int, found: int, expected: int):
        self.position = position
        self.found = found
        self.expected = expected
        super().__init__(
            f"position {position}: node index {found}, expected {expected} (indices must be 1..n in order)"
        )


class LeakageError(NoclError):
    """A link-prediction descriptor contains the queried edge."""


class DensityError(NoclError):
    """Graph too dense to supply the requested number of negative links."""


class CorpusFormatError(NoclError):
    """Malformed instruction-corpus record."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        at = f"line {line}: " if line is not None else ""
        super().__init__(f"{at}{message}")


class PredictionFormatError(NoclError):
    """Malformed prediction record or id misalignment."""


class MetricError(NoclError):
    """A metric is undefined for the given inputs."""


class ConfigError(NoclError):
    """Invalid pipeline configuration."""
