# Filename: src/eventgraph/config.py
"""
Run configuration.

Values come from the dataclass defaults, then an optional YAML file with
`encoding:` and `train:` sections, then command-line flags.
"""

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import yaml

from .graph import DEFAULT_COLORS

log = logging.getLogger(__name__)

VECTORS_ENV = "EVENTGRAPH_VECTORS"

TemporalMode = Literal["sinusoidal", "zero"]


@dataclass(frozen=True)
class EncodingConfig:
    """Model dimensions. Defaults are the full-size model."""

    hidden_dim: int = 64
    temporal_dim: int = 16
    type_dim: int = 16
    auto_dim: int = 128
    key_dim: int = 16
    word_dim: int = 300
    temporal_mode: TemporalMode = "sinusoidal"
    conv_layers: int = 5
    conv_kernel: int = 7
    attention_heads: int = 1
    freeze_words: bool = True
    vectors: str | None = None

    def __post_init__(self):
        dims = (
            self.hidden_dim,
            self.temporal_dim,
            self.type_dim,
            self.auto_dim,
            self.key_dim,
            self.word_dim,
            self.conv_layers,
            self.conv_kernel,
            self.attention_heads,
        )
        if min(dims) <= 0:
            raise ValueError(f"dimensions must be positive: {self}")
        if self.temporal_dim % 2:
            raise ValueError(f"temporal_dim must be even, got {self.temporal_dim}")
        if self.temporal_mode not in ("sinusoidal", "zero"):
            raise ValueError(f"unknown temporal_mode {self.temporal_mode!r}")
        if self.hidden_dim % self.attention_heads:
            raise ValueError("hidden_dim must divide by attention_heads")

    @property
    def event_dim(self) -> int:
        """Width of an event embedding: type plus three label segments."""
        return self.type_dim + 3 * self.hidden_dim


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 5e-4
    weight_decay: float = 0.01
    clip_norm: float = 1.0
    max_steps: int = 10000
    eval_interval: int = 500
    log_interval: int = 50
    eval_limit: int | None = 200
    max_events: int = 100
    seed: int = 42
    multi_mode: bool = False
    strict: bool = True
    colors: tuple[str, ...] = DEFAULT_COLORS
    tokenizer: str = "rule"
    device: str = "cpu"

    def __post_init__(self):
        if self.batch_size <= 0 or self.learning_rate < 0 or self.max_steps < 0:
            raise ValueError(f"batch size, learning rate and steps: {self}")
        if self.eval_interval <= 0 or self.log_interval <= 0:
            raise ValueError("intervals must be positive")
        object.__setattr__(self, "colors", tuple(self.colors))


@dataclass(frozen=True)
class RunConfig:
    encoding: EncodingConfig = field(default_factory=EncodingConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def overlay(self, **flags: Any) -> "RunConfig":
        """
        Applies command-line flags over the loaded values. A flag left at
        None keeps the current value; names are matched against both sections.
        """
        encoding: dict[str, Any] = {}
        train: dict[str, Any] = {}
        for name, value in flags.items():
            if value is None:
                continue
            if name in _names(EncodingConfig):
                encoding[name] = value
            elif name in _names(TrainConfig):
                train[name] = value
            else:
                raise ValueError(f"unknown setting {name!r}")
        return RunConfig(
            dataclasses.replace(self.encoding, **encoding),
            dataclasses.replace(self.train, **train),
        )

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> "RunConfig":
        data = dict(data or {})
        unknown = set(data) - {"encoding", "train"}
        if unknown:
            raise ValueError(f"unknown config sections: {sorted(unknown)}")
        return cls(
            _section(EncodingConfig, data.get("encoding")),
            _section(TrainConfig, data.get("train")),
        )


def _names(cls) -> set[str]:
    return {f.name for f in dataclasses.fields(cls)}


def _section(cls, values: dict[str, Any] | None):
    values = dict(values or {})
    unknown = set(values) - _names(cls)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**values)


def load_config(path: str | Path | None = None) -> RunConfig:
    """Reads a YAML config file, or returns the defaults when `path` is None."""
    config = RunConfig()
    if path is not None:
        with open(path, encoding="utf-8") as reader:
            config = RunConfig.from_dict(yaml.safe_load(reader))
        log.info(f"Loaded config from {path}")

    vectors = os.environ.get(VECTORS_ENV)
    if vectors:
        log.info(f"Word vectors from ${VECTORS_ENV}: {vectors}")
        config = config.overlay(vectors=vectors)
    return config
