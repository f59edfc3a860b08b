# Filename: src/eventgraph/training.py
"""
Teacher-forced training.

Each step runs the model over a batch with gold arguments fed to every head,
weights the four per-head losses by their learned uncertainties, and takes
one clipped AdamW step. Every eval_interval steps the model is scored on the
validation split; the best and the last state are kept as checkpoints.
"""

import logging
import random
from dataclasses import dataclass
from itertools import chain
from pathlib import Path

import numpy as np
import torch

from .checkpoint import save_checkpoint
from .config import RunConfig
from .data.batch import Batch, make_batches
from .data.preprocess import (
    Trajectory,
    load_manifest,
    load_split,
    unique_datapoints,
)
from .data.vocab import load_vectors
from .evaluation import evaluate
from .losses import HEADS, LossWeights, head_losses, total_loss
from .model import EventGraphModel
from .util.resources import memory_mb

log = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    """Raised when a batch produces a non-finite loss."""

    def __init__(self, batch_ids: list[str], losses: dict[str, float]):
        self.batch_ids = batch_ids
        self.losses = losses
        super().__init__(f"non-finite loss {losses} on batch starting {batch_ids[0]}")


def seed_everything(seed: int):
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


def make_optimizer(
    model: EventGraphModel, weights: LossWeights, config: RunConfig
) -> torch.optim.Optimizer:
    params = [
        p for p in chain(model.parameters(), weights.parameters()) if p.requires_grad
    ]
    return torch.optim.AdamW(
        params, lr=config.train.learning_rate, weight_decay=config.train.weight_decay
    )


def train_step(
    model: EventGraphModel,
    weights: LossWeights,
    optimizer: torch.optim.Optimizer,
    batch: Batch,
    clip_norm: float,
) -> tuple[torch.Tensor, torch.Tensor]:
    """
    One optimization step. Returns (total loss, per-head losses), detached.

    Raises:
        TrainingDivergedError: if the loss is not finite; parameters are
            left as they were
    """
    model.train()
    batch = batch.to(model.device)
    outputs = model.teacher_forced(batch)
    targets = (batch.kinds, batch.src, batch.dst, batch.labels)
    losses = head_losses(outputs, targets, batch.head_masks)
    total = total_loss(losses, weights)
    if not torch.isfinite(total):
        raise TrainingDivergedError(
            batch.ids, dict(zip(HEADS, losses.detach().tolist()))
        )

    optimizer.zero_grad()
    total.backward()
    torch.nn.utils.clip_grad_norm_(
        [p for group in optimizer.param_groups for p in group["params"]], clip_norm
    )
    optimizer.step()
    return total.detach(), losses.detach()


@dataclass
class TrainResult:
    last: Path
    best: Path | None
    steps: int
    best_score: float | None


def validation_score(
    model: EventGraphModel, trajectories: list[Trajectory], config: RunConfig
) -> float:
    """TF F1, or FR F1 in multi mode, on at most eval_limit trajectories."""
    train = config.train
    subset = trajectories[: train.eval_limit] if train.eval_limit else trajectories
    metric = "fr" if train.multi_mode else "tf"
    model.eval()
    try:
        report = evaluate(
            model, subset, metric, train.multi_mode, train.max_events, train.colors
        )
    finally:
        model.train()
    scores = report.fr if train.multi_mode else report.tf
    return scores.macro


def train(
    data_dir: str | Path, output_dir: str | Path, config: RunConfig
) -> TrainResult:
    """
    Trains on the cached `train` split of `data_dir` and writes last.pt and
    best.pt to `output_dir`. With max_steps 0 the last checkpoint holds the
    initialization.
    """
    data_dir, output_dir = Path(data_dir), Path(output_dir)
    train_config = config.train
    seed_everything(train_config.seed)

    manifest = load_manifest(data_dir)
    if manifest.multi_mode != train_config.multi_mode:
        log.warning(f"Cache multi_mode is {manifest.multi_mode}; using it")
    config = config.overlay(
        multi_mode=manifest.multi_mode,
        colors=manifest.colors,
        tokenizer=manifest.tokenizer,
    )
    train_config = config.train
    datapoints = unique_datapoints(load_split(data_dir, "train"))
    if not datapoints:
        raise ValueError(f"{data_dir}: the train split is empty")
    validation = load_split(data_dir, "valid") if "valid" in manifest.splits else []
    log.info(
        f"Training on {len(datapoints)} datapoints, "
        f"validating on {len(validation)} trajectories"
    )

    vectors = None
    if config.encoding.vectors:
        vectors = load_vectors(
            config.encoding.vectors, manifest.words, config.encoding.word_dim
        )
    model = EventGraphModel(
        config.encoding,
        manifest.words,
        manifest.labels,
        vectors,
        manifest.tokenizer,
        train_config.seed,
    ).to(train_config.device)
    weights = LossWeights().to(train_config.device)
    optimizer = make_optimizer(model, weights, config)

    last, best = output_dir / "last.pt", output_dir / "best.pt"
    best_score: float | None = None
    step, epoch = 0, 0
    while step < train_config.max_steps:
        batches = make_batches(
            datapoints,
            train_config.batch_size,
            train_config.seed + epoch,
            manifest.words,
            manifest.labels,
        )
        for batch in batches:
            if step >= train_config.max_steps:
                break
            total, losses = train_step(
                model, weights, optimizer, batch, train_config.clip_norm
            )
            step += 1
            log.debug(f"Step {step}: loss {total.item():.4f}")
            if step % train_config.log_interval == 0:
                parts = ", ".join(
                    f"{name} {value:.4f}" for name, value in zip(HEADS, losses.tolist())
                )
                log.info(
                    f"Step {step}: total {total.item():.4f} ({parts}), "
                    f"s={weights.s.detach().tolist()}, rss {memory_mb():.0f} MiB"
                )
            if validation and step % train_config.eval_interval == 0:
                score = validation_score(model, validation, config)
                log.info(f"Step {step}: validation F1 {score:.4f}")
                if best_score is None or score > best_score:
                    best_score = score
                    save_checkpoint(
                        best, model, weights, config, step, {"validation_f1": score}
                    )
        epoch += 1

    save_checkpoint(last, model, weights, config, step)
    log.info(f"Finished after {step} steps")
    return TrainResult(
        last=last,
        best=best if best_score is not None else None,
        steps=step,
        best_score=best_score,
    )
