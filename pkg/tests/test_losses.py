# Filename: tests/test_losses.py
"""Tests for per-head losses and the learned loss weighting."""

import math

import pytest
import torch

from eventgraph.losses import LossWeights, head_losses, total_loss
from eventgraph.model import HeadOutputs


def uniform(batch: int, nodes: int, labels: int) -> HeadOutputs:
    def flat(width: int) -> torch.Tensor:
        return torch.full((batch, width), -math.log(width))

    return HeadOutputs(flat(6), flat(nodes), flat(nodes), flat(labels))


def grids(targets: list[int], masks: list[bool]) -> tuple[list, list]:
    """The same (1, 2) target and mask grid for all four heads"""
    target = torch.tensor([[0, *targets]])
    mask = torch.tensor([[False, *masks]])
    return [target] * 4, [mask] * 4


def test_uniform_type_loss():
    """A uniform type distribution costs ln 6"""
    targets, masks = grids([2], [True])
    masks = [masks[0], *(torch.zeros_like(m) for m in masks[1:])]

    losses = head_losses([uniform(1, 3, 5)], targets, masks)

    assert losses.tolist()[1:] == [0.0, 0.0, 0.0]
    assert losses[0].item() == pytest.approx(math.log(6))


def test_uniform_all_heads():
    """Every head costs ln of its support size under a uniform output"""
    targets, masks = grids([1], [True])

    losses = head_losses([uniform(1, 3, 5)], targets, masks)

    expected = [math.log(6), math.log(3), math.log(3), math.log(5)]
    assert losses.tolist() == pytest.approx(expected)


def test_masked_targets_ignored():
    """Masked positions neither count nor need a valid target"""
    outputs = [uniform(2, 3, 5)]
    target = torch.tensor([[0, 1], [0, -1]])
    mask = torch.tensor([[False, True], [False, False]])

    losses = head_losses(outputs, [target] * 4, [mask] * 4)

    assert losses[1].item() == pytest.approx(math.log(3))


def test_nll_of_target():
    """A head costs the negative log-probability of its target"""
    confident = torch.log(torch.tensor([[0.5, 0.5, 0, 0, 0, 0]]).clamp(min=1e-30))
    outputs = [
        HeadOutputs(confident, torch.zeros(1, 1), torch.zeros(1, 1), torch.zeros(1, 1))
    ]
    targets, masks = grids([0], [True])

    losses = head_losses(outputs, targets, masks)

    assert losses.tolist() == pytest.approx([math.log(2), 0.0, 0.0, 0.0], abs=1e-6)


def test_no_outputs():
    """With nothing to score every head contributes zero"""
    target = torch.zeros(1, 1, dtype=torch.long)
    mask = torch.zeros(1, 1, dtype=torch.bool)

    losses = head_losses([], [target] * 4, [mask] * 4)

    assert losses.tolist() == [0.0, 0.0, 0.0, 0.0]


def test_target_out_of_support():
    """A selected node index past the node count is refused"""
    targets, masks = grids([3], [True])

    with pytest.raises(IndexError):
        head_losses([uniform(1, 3, 5)], targets, masks)


def test_negative_target_selected():
    """A selected position without a node is refused"""
    targets, masks = grids([-1], [True])

    with pytest.raises(IndexError):
        head_losses([uniform(1, 3, 5)], targets, masks)


def test_weights_at_zero():
    """With every s at 0 the total is the loss sum plus 4 ln 2"""
    losses = torch.tensor([1.0, 2.0, 0.5, 0.25])

    total = total_loss(losses, LossWeights())

    assert total.item() == pytest.approx(3.75 + 4 * math.log(2))


def test_weights_scale_losses():
    """A larger s shrinks its head's loss and grows the penalty"""
    weights = LossWeights()
    with torch.no_grad():
        weights.s[0] = 1.0
    losses = torch.tensor([2.0, 0.0, 0.0, 0.0])

    total = total_loss(losses, weights)

    expected = 2.0 * math.exp(-1) + math.log1p(math.e) + 3 * math.log(2)
    assert total.item() == pytest.approx(expected, rel=1e-5)


def test_weights_learnable():
    """The log-variances receive gradients"""
    weights = LossWeights()

    total_loss(torch.tensor([1.0, 1.0, 1.0, 1.0]), weights).backward()

    assert weights.s.grad is not None
    assert weights.s.grad.shape == (4,)


def test_weight_gradients_float64():
    """Analytic and numeric gradients with respect to the log-variances agree"""
    weights = LossWeights().double()
    losses = torch.tensor([1.0, 0.5, 2.0, 0.25], dtype=torch.float64)
    s = torch.tensor([0.1, -0.2, 0.3, 0.0], dtype=torch.float64, requires_grad=True)

    def run(s):
        return torch.func.functional_call(weights, {"s": s}, (losses,))

    assert torch.autograd.gradcheck(run, (s,))
