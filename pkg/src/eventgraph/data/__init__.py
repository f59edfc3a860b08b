# Filename: src/eventgraph/data/__init__.py
"""
eventgraph Data Package.

Dataset reading, command parsing, tokenization, trajectory replay and
batching.
"""

from .batch import Batch, collate, make_batches
from .dataset import (
    FORMATS,
    DatasetSchemaError,
    RawExample,
    dataset_stats,
    load_dataset,
    sort_commands,
    write_dataset,
)
from .parse import CommandParseError, parse_command, parse_commands
from .preprocess import (
    Datapoint,
    Manifest,
    ReplayDesyncError,
    Trajectory,
    build_datapoints,
    build_vocabularies,
    colored_item_split,
    load_manifest,
    load_split,
    preprocess,
    unique_datapoints,
)
from .tokenize import TOKENIZERS, tokenize
from .vocab import Vocabulary, load_vectors

__all__ = [
    "Batch",
    "collate",
    "make_batches",
    "FORMATS",
    "DatasetSchemaError",
    "RawExample",
    "dataset_stats",
    "load_dataset",
    "sort_commands",
    "write_dataset",
    "CommandParseError",
    "parse_command",
    "parse_commands",
    "Datapoint",
    "Manifest",
    "ReplayDesyncError",
    "Trajectory",
    "build_datapoints",
    "build_vocabularies",
    "colored_item_split",
    "load_manifest",
    "load_split",
    "preprocess",
    "unique_datapoints",
    "TOKENIZERS",
    "tokenize",
    "Vocabulary",
    "load_vectors",
]
