# Filename: src/eventgraph/data/dataset.py
"""
Loads command-generation datasets into RawExample records.

The canonical format is JSON Lines with one RawExample object per line.
A second reader accepts the released JSON array layout. Readers register in
the FORMATS dict and are picked by file suffix.
"""

import json
import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from statistics import mean
from typing import Any, Type

from ..graph import RdfTriple, UpdateCommand, apply_commands
from .parse import CommandParseError, parse_commands
from .tokenize import tokenize

log = logging.getLogger(__name__)


class DatasetSchemaError(ValueError):
    """A dataset record that does not fit the schema."""

    def __init__(self, path: str | Path, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class RawExample:
    game_id: str
    walkthrough_step: int
    random_step: int
    observation: str
    previous_action: str
    previous_graph: frozenset[RdfTriple] = field(default_factory=frozenset)
    target_commands: tuple[UpdateCommand, ...] = ()

    @property
    def key(self) -> tuple[str, int, int]:
        return self.game_id, self.walkthrough_step, self.random_step

    @property
    def t_g(self) -> int:
        """Game step: walkthrough steps taken plus random steps since."""
        return self.walkthrough_step + self.random_step

    def to_dict(self) -> dict[str, Any]:
        return {
            "game_id": self.game_id,
            "walkthrough_step": self.walkthrough_step,
            "random_step": self.random_step,
            "observation": self.observation,
            "previous_action": self.previous_action,
            "previous_graph": [
                [t.subject, t.object, t.relation] for t in sorted(self.previous_graph)
            ],
            "target_commands": [str(c) for c in self.target_commands],
        }


def sort_commands(commands: Iterable[UpdateCommand]) -> list[UpdateCommand]:
    """Deletes before adds, then lexicographic by (n1, n2, r)."""
    return sorted(commands, key=lambda c: (c.op != "delete", c.n1, c.n2, c.r))


# --- Field coercion ---


def _commands(value: Any) -> list[UpdateCommand]:
    if isinstance(value, str):
        return parse_commands(value)
    if not isinstance(value, list):
        raise TypeError(f"expected command string or list, got {type(value).__name__}")
    return [command for item in value for command in _commands(item)]


def _graph(value: Any) -> frozenset[RdfTriple]:
    """Triples `[s, o, r]`, or command strings accumulated from empty."""
    if isinstance(value, str):
        return frozenset(apply_commands((), parse_commands(value)))
    if not isinstance(value, list):
        raise TypeError(f"expected triple list, got {type(value).__name__}")
    if all(isinstance(item, str) for item in value):
        return frozenset(apply_commands((), _commands(value)))
    triples = set()
    for item in value:
        if not (isinstance(item, list) and len(item) == 3):
            raise TypeError(f"expected [subject, object, relation], got {item!r}")
        triples.add(RdfTriple(*item))
    return frozenset(triples)


def _step(value: Any, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise TypeError(f"{name} must be a non-negative integer, got {value!r}")
    return value


def _text(value: Any, name: str) -> str:
    if not isinstance(value, str):
        raise TypeError(f"{name} must be a string, got {value!r}")
    return value


# --- Formats ---


class DatasetFormat(ABC):
    """Abstract Base Class for dataset readers."""

    suffixes: tuple[str, ...] = ()

    @staticmethod
    @abstractmethod
    def is_available() -> bool:
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def records(self, path: Path) -> Iterator[tuple[int, dict[str, Any]]]:
        """Yields (line or record number, raw object)."""

    @abstractmethod
    def example(self, record: dict[str, Any]) -> RawExample:
        """Builds one example; raises TypeError/KeyError/ValueError on bad input."""

    def read(self, path: Path) -> Iterator[RawExample]:
        for line, record in self.records(path):
            try:
                if not isinstance(record, dict):
                    raise TypeError("record is not an object")
                yield self.example(record)
            except CommandParseError as e:
                raise DatasetSchemaError(path, line, f"bad command: {e}") from e
            except KeyError as e:
                raise DatasetSchemaError(path, line, f"missing field {e}") from e
            except (TypeError, ValueError) as e:
                raise DatasetSchemaError(path, line, str(e)) from e


class Jsonl(DatasetFormat):
    """One RawExample object per line."""

    suffixes = (".jsonl",)

    @staticmethod
    def is_available() -> bool:
        return True

    def records(self, path: Path) -> Iterator[tuple[int, dict[str, Any]]]:
        with open(path, encoding="utf-8") as reader:
            for line, text in enumerate(reader, 1):
                if not text.strip():
                    continue
                try:
                    yield line, json.loads(text)
                except json.JSONDecodeError as e:
                    raise DatasetSchemaError(path, line, f"invalid JSON: {e}") from e

    def example(self, record: dict[str, Any]) -> RawExample:
        return RawExample(
            game_id=_text(record["game_id"], "game_id"),
            walkthrough_step=_step(record["walkthrough_step"], "walkthrough_step"),
            random_step=_step(record["random_step"], "random_step"),
            observation=_text(record["observation"], "observation"),
            previous_action=_text(record["previous_action"], "previous_action"),
            previous_graph=_graph(record.get("previous_graph", [])),
            target_commands=tuple(_commands(record.get("target_commands", []))),
        )


class Gata(DatasetFormat):
    """
    The released JSON array layout: `game`, `step: [walkthrough, random]`,
    `previous_graph_seen` and `target_commands`.
    """

    suffixes = (".json",)

    @staticmethod
    def is_available() -> bool:
        return True

    def records(self, path: Path) -> Iterator[tuple[int, dict[str, Any]]]:
        with open(path, encoding="utf-8") as reader:
            try:
                data = json.load(reader)
            except json.JSONDecodeError as e:
                raise DatasetSchemaError(path, e.lineno, f"invalid JSON: {e}") from e
        if not isinstance(data, list):
            raise DatasetSchemaError(path, 1, "expected a JSON array of records")
        yield from enumerate(data, 1)

    def example(self, record: dict[str, Any]) -> RawExample:
        step = record["step"]
        if not (isinstance(step, list) and len(step) == 2):
            raise TypeError(f"step must be [walkthrough, random], got {step!r}")
        return RawExample(
            game_id=_text(record["game"], "game"),
            walkthrough_step=_step(step[0], "walkthrough step"),
            random_step=_step(step[1], "random step"),
            observation=_text(record["observation"], "observation"),
            previous_action=_text(record["previous_action"], "previous_action"),
            previous_graph=_graph(record.get("previous_graph_seen", [])),
            target_commands=tuple(_commands(record.get("target_commands", []))),
        )


FORMATS: dict[str, Type[DatasetFormat]] = {
    reader.__name__.lower(): reader
    for reader in (Jsonl, Gata)
    if reader.is_available()
}


def detect_format(path: Path) -> str:
    for name, reader in FORMATS.items():
        if path.suffix in reader.suffixes:
            return name
    raise ValueError(f"no dataset reader for {path.name}, have {sorted(FORMATS)}")


def load_dataset(path: str | Path, format: str | None = None) -> list[RawExample]:
    """
    Reads every example in `path`.

    Raises:
        DatasetSchemaError: on a malformed record or a repeated
            (game_id, walkthrough_step, random_step) key
    """
    path = Path(path)
    reader = FORMATS[format or detect_format(path)]()
    examples: list[RawExample] = []
    seen: dict[tuple[str, int, int], int] = {}
    for number, example in enumerate(reader.read(path), 1):
        if example.key in seen:
            raise DatasetSchemaError(
                path,
                number,
                f"duplicate step {example.key}, "
                f"first seen in record {seen[example.key]}",
            )
        seen[example.key] = number
        examples.append(example)
    log.info(f"Loaded {len(examples)} examples from {path}")
    return examples


def write_dataset(path: str | Path, examples: Iterable[RawExample]):
    """Writes examples in the canonical JSON Lines format."""
    with open(path, "w", encoding="utf-8") as writer:
        for example in examples:
            writer.write(json.dumps(example.to_dict()) + "\n")


def dataset_stats(
    examples: list[RawExample], tokenizer: str = "rule"
) -> dict[str, Any]:
    """Example, game, token, command, node-type and edge-type counts."""
    node_types = set()
    edge_types = set()
    for example in examples:
        triples = set(example.previous_graph)
        triples.update(c.triple for c in example.target_commands)
        for triple in triples:
            node_types.update((triple.subject, triple.object))
            edge_types.add(triple.relation)

    def average(values: Iterable[int]) -> float:
        values = list(values)
        return mean(values) if values else 0.0

    return {
        "examples": len(examples),
        "games": len({e.game_id for e in examples}),
        "avg_obs_tokens": average(
            len(tokenize(e.observation, tokenizer)) for e in examples
        ),
        "avg_commands": average(len(e.target_commands) for e in examples),
        "node_types": len(node_types),
        "edge_types": len(edge_types),
        "avg_connections": average(len(e.previous_graph) for e in examples),
    }
