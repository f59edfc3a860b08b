# Filename: src/eventgraph/model/attention.py
"""Attention helpers that stay finite when every key is masked."""

import torch
from torch import nn


def masked_softmax(scores: torch.Tensor, mask: torch.Tensor, dim: int) -> torch.Tensor:
    """
    Softmax over `dim` restricted to entries where `mask` is set. Masked
    entries get weight 0; a slice with no unmasked entry is all zeros.
    """
    mask = mask.expand_as(scores)
    filled = scores.masked_fill(~mask, torch.finfo(scores.dtype).min)
    return torch.softmax(filled, dim=dim) * mask


def masked_log_softmax(
    scores: torch.Tensor, mask: torch.Tensor, dim: int = -1
) -> torch.Tensor:
    """Log-softmax with masked entries pushed to the dtype's minimum."""
    filled = scores.masked_fill(~mask.expand_as(scores), torch.finfo(scores.dtype).min)
    return torch.log_softmax(filled, dim=dim)


class MaskedAttention(nn.Module):
    """
    nn.MultiheadAttention over (B, L, H) tensors with a boolean key mask
    (True = valid). Queries with no valid key, including the case of an
    empty memory, get a learned bias vector instead of an attention read.
    """

    def __init__(self, dim: int, heads: int = 1):
        super().__init__()
        self.attention = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.bias = nn.Parameter(torch.zeros(dim))

    def forward(
        self,
        query: torch.Tensor,
        memory: torch.Tensor,
        key_mask: torch.Tensor,
        causal: bool = False,
    ) -> torch.Tensor:
        batch, length, dim = query.shape
        if memory.size(1) == 0:
            return self.bias.expand(batch, length, dim)

        # (B, Lq, Lk) validity of each query/key pair
        allowed = key_mask.unsqueeze(1).expand(batch, length, memory.size(1))
        if causal:
            allowed = allowed & torch.ones(
                length, memory.size(1), dtype=torch.bool, device=query.device
            ).tril()
        starved = ~allowed.any(dim=-1)

        # Open key 0 for starved queries so the softmax stays finite
        allowed = allowed.clone()
        allowed[..., 0] |= starved
        attn_mask = (~allowed).repeat_interleave(self.attention.num_heads, dim=0)
        output, _ = self.attention(
            query, memory, memory, attn_mask=attn_mask, need_weights=False
        )
        return torch.where(starved.unsqueeze(-1), self.bias.expand_as(output), output)
