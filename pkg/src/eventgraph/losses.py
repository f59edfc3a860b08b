# Filename: src/eventgraph/losses.py
"""
Per-head negative log-likelihood and the learned uncertainty weighting that
combines the four heads into one training loss.
"""

from collections.abc import Sequence

import torch
from torch import nn
from torch.nn import functional as F

from .model import HeadOutputs

HEADS = ("type", "src", "dst", "label")


def head_losses(
    outputs: Sequence[HeadOutputs],
    targets: Sequence[torch.Tensor],
    masks: Sequence[torch.Tensor],
) -> torch.Tensor:
    """
    Mean NLL per head over the positions its mask selects, shape (4,).

    `outputs[j]` scores target position j + 1; `targets` and `masks` are the
    (B, T) grids of the four heads in chain order. A head with no selected
    position contributes 0.

    Raises:
        IndexError: if a selected target lies outside its head's support
    """
    losses = []
    for h, name in enumerate(HEADS):
        total, count = None, 0
        for j, step in enumerate(outputs):
            logp = step.as_tuple()[h]
            mask = masks[h][:, j + 1]
            if not mask.any():
                continue
            target = targets[h][:, j + 1]
            chosen = target[mask]
            if chosen.min() < 0 or chosen.max() >= logp.size(-1):
                raise IndexError(
                    f"{name} target {chosen.tolist()} outside support {logp.size(-1)}"
                )
            nll = -logp.gather(1, target.clamp(min=0).unsqueeze(1)).squeeze(1)
            nll = nll[mask].sum()
            total = nll if total is None else total + nll
            count += int(mask.sum())
        if total is None:
            reference = outputs[0].kinds if outputs else torch.zeros(())
            losses.append(reference.new_zeros(()))
        else:
            losses.append(total / count)
    return torch.stack(losses)


class LossWeights(nn.Module):
    """One learned log-variance s_i per head, starting at 0."""

    def __init__(self, heads: int = len(HEADS)):
        super().__init__()
        self.s = nn.Parameter(torch.zeros(heads))

    def forward(self, losses: torch.Tensor) -> torch.Tensor:
        """sum_i exp(-s_i) L_i + ln(1 + exp(s_i))"""
        return (torch.exp(-self.s) * losses + F.softplus(self.s)).sum()


def total_loss(losses: torch.Tensor, weights: LossWeights) -> torch.Tensor:
    return weights(losses)
