"""Knowledge-graph grounded commonsense QA pipeline."""

from schemaqa._core import (
    DatasetSplit,
    FileEmbeddings,
    HashedBagOfWords,
    KnowledgeGraph,
    LoadOptions,
    SchemaGraph,
    SchemaQaError,
    TextEncoder,
    TrainedModel,
    __version__,
    build_kg,
    enumerate_paths,
    expand_schema_graph,
    extract_schema_graph,
    ground,
    ground_statement,
    lemmatize,
    load_checkpoint,
    load_dataset,
    load_kg,
    make_statement,
    normalize,
    parse_dataset,
    run_selftest,
    sigmoid,
    softmax,
    train,
)

__all__ = [
    "DatasetSplit",
    "FileEmbeddings",
    "HashedBagOfWords",
    "KnowledgeGraph",
    "LoadOptions",
    "SchemaGraph",
    "SchemaQaError",
    "TextEncoder",
    "TrainedModel",
    "__version__",
    "build_kg",
    "enumerate_paths",
    "expand_schema_graph",
    "extract_schema_graph",
    "ground",
    "ground_statement",
    "lemmatize",
    "load_checkpoint",
    "load_dataset",
    "load_kg",
    "make_statement",
    "normalize",
    "parse_dataset",
    "run_selftest",
    "sigmoid",
    "softmax",
    "train",
]
