# Filename: src/eventgraph/checkpoint.py
"""
Versioned single-file checkpoints: config echo, vocabularies, tokenizer,
seed, step, model parameters and loss weights.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import torch

from .config import RunConfig
from .data.vocab import Vocabulary
from .losses import LossWeights
from .model import EventGraphModel
from .util.atomic import atomic_path

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class CheckpointError(ValueError):
    """Raised when a checkpoint file has an unexpected schema."""


@dataclass
class Checkpoint:
    model: EventGraphModel
    weights: LossWeights
    config: RunConfig
    seed: int
    step: int
    metrics: dict[str, float]


def save_checkpoint(
    path: str | Path,
    model: EventGraphModel,
    weights: LossWeights,
    config: RunConfig,
    step: int,
    metrics: dict[str, float] | None = None,
):
    payload: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "words": model.words.to_list(),
        "labels": model.labels.to_list(),
        "tokenizer": model.embeddings.tokenizer,
        "seed": config.train.seed,
        "step": step,
        "metrics": dict(metrics or {}),
        "model": model.state_dict(),
        "loss_weights": weights.state_dict(),
    }
    with atomic_path(path) as temp_path:
        torch.save(payload, temp_path)
    log.info(f"Checkpoint at step {step} written to {path}")


def load_checkpoint(path: str | Path, device: str = "cpu") -> Checkpoint:
    """
    Rebuilds the model and loss weights stored at `path`.

    Raises:
        CheckpointError: if the schema version does not match
    """
    payload = torch.load(path, map_location=device, weights_only=True)
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint schema {version}, expected {SCHEMA_VERSION}"
        )

    config = RunConfig.from_dict(payload["config"])
    model = EventGraphModel(
        config.encoding,
        Vocabulary.from_list(payload["words"], 2),
        Vocabulary.from_list(payload["labels"], 1),
        tokenizer=payload["tokenizer"],
        seed=payload["seed"],
    )
    model.load_state_dict(payload["model"])
    weights = LossWeights()
    weights.load_state_dict(payload["loss_weights"])
    log.info(f"Loaded checkpoint {path} (step {payload['step']})")
    return Checkpoint(
        model=model.to(device),
        weights=weights.to(device),
        config=config,
        seed=payload["seed"],
        step=payload["step"],
        metrics=payload["metrics"],
    )
