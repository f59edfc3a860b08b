# Filename: tests/test_training.py
"""Tests for training steps, determinism and divergence handling."""

import dataclasses

import pytest
import torch

from eventgraph.checkpoint import load_checkpoint
from eventgraph.data import collate, load_split, unique_datapoints
from eventgraph.evaluation import evaluate
from eventgraph.losses import LossWeights
from eventgraph.training import (
    TrainingDivergedError,
    make_optimizer,
    train,
    train_step,
)


def first_batch(model, cache_dir):
    datapoints = unique_datapoints(load_split(cache_dir, "train"))[:4]
    return collate(datapoints, model.words, model.labels)


def snapshot(module: torch.nn.Module) -> dict[str, torch.Tensor]:
    return {k: v.clone() for k, v in module.state_dict().items()}


def test_step_reports_losses(model, cache_dir, run_config):
    """A step returns a finite total and four head losses"""
    weights = LossWeights()
    optimizer = make_optimizer(model, weights, run_config)
    batch = first_batch(model, cache_dir)

    total, losses = train_step(model, weights, optimizer, batch, 1.0)

    assert losses.shape == (4,)
    assert torch.isfinite(total)


def test_step_updates_parameters(model, cache_dir, run_config):
    """A step with a positive learning rate moves the parameters"""
    weights = LossWeights()
    optimizer = make_optimizer(model, weights, run_config)
    before = snapshot(model)

    train_step(model, weights, optimizer, first_batch(model, cache_dir), 1.0)

    after = model.state_dict()
    assert any(not torch.equal(before[k], after[k]) for k in before)


def test_zero_learning_rate(model, cache_dir, run_config):
    """With lr 0 a step leaves every parameter as it was"""
    config = run_config.overlay(learning_rate=0.0)
    weights = LossWeights()
    optimizer = make_optimizer(model, weights, config)
    before = snapshot(model)

    train_step(model, weights, optimizer, first_batch(model, cache_dir), 1.0)

    after = model.state_dict()
    assert all(torch.equal(before[k], after[k]) for k in before)


def test_frozen_words_stay(model, cache_dir, run_config):
    """Frozen word vectors are not handed to the optimizer"""
    weights = LossWeights()

    optimizer = make_optimizer(model, weights, run_config)

    params = [p for group in optimizer.param_groups for p in group["params"]]
    assert all(p is not model.embeddings.words.weight for p in params)


def test_divergence_raises(model, cache_dir, run_config):
    """A non-finite loss stops training and names the batch"""
    weights = LossWeights()
    with torch.no_grad():
        weights.s[0] = float("inf")
    optimizer = make_optimizer(model, weights, run_config)
    batch = first_batch(model, cache_dir)
    before = snapshot(model)

    with pytest.raises(TrainingDivergedError) as error:
        train_step(model, weights, optimizer, batch, 1.0)

    after = model.state_dict()
    assert all(torch.equal(before[k], after[k]) for k in before)
    assert error.value.batch_ids == batch.ids


def test_train_writes_checkpoints(cache_dir, tmp_path, run_config):
    """Training writes the last checkpoint and a best one when validating"""
    result = train(cache_dir, tmp_path / "run", run_config)

    assert result.best is not None and result.best.exists()
    assert result.last.exists()
    assert result.steps == 2


def test_train_zero_steps(cache_dir, tmp_path, run_config):
    """max_steps 0 saves the initialization and nothing else"""
    config = run_config.overlay(max_steps=0)

    result = train(cache_dir, tmp_path / "run", config)

    assert load_checkpoint(result.last).step == 0
    assert result.best is None
    assert result.steps == 0


def test_train_deterministic(cache_dir, tmp_path, run_config):
    """The same seed and data give the same parameters"""
    first = train(cache_dir, tmp_path / "a", run_config)

    second = train(cache_dir, tmp_path / "b", run_config)

    a = load_checkpoint(first.last).model.state_dict()
    b = load_checkpoint(second.last).model.state_dict()
    assert all(torch.equal(a[k], b[k]) for k in a)


def test_train_needs_train_split(cache_dir, tmp_path, run_config):
    """A cache without a readable train split cannot be trained on"""
    (cache_dir / "train.datapoints.jsonl").unlink()

    with pytest.raises(FileNotFoundError):
        train(cache_dir, tmp_path / "run", run_config)


@pytest.mark.slow
def test_overfit_one_batch(model, cache_dir, run_config):
    """Repeated steps on one batch drive its loss down"""
    config = run_config.overlay(learning_rate=5e-3)
    weights = LossWeights()
    optimizer = make_optimizer(model, weights, config)
    batch = first_batch(model, cache_dir)
    first, _ = train_step(model, weights, optimizer, batch, 1.0)

    for _ in range(200):
        last, losses = train_step(model, weights, optimizer, batch, 1.0)

    assert losses[0] < 0.5
    assert last < first


@pytest.mark.slow
def test_overfit_teacher_forcing(cache_dir, tmp_path, run_config):
    """A long run on the toy world fits its training split"""
    config = dataclasses.replace(
        run_config.overlay(max_steps=2000, eval_interval=500, learning_rate=1e-3),
        encoding=dataclasses.replace(run_config.encoding, hidden_dim=32, auto_dim=32),
    )

    result = train(cache_dir, tmp_path / "run", config)

    model = load_checkpoint(result.last).model.eval()
    report = evaluate(model, load_split(cache_dir, "train"), "tf", max_events=12)
    assert report.tf.macro >= 0.95
