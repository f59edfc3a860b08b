# Filename: src/eventgraph/model/text_encoder.py
"""
Transformer encoder block for observation and action text: depthwise
separable convolutions, one self-attention layer and a feed-forward layer,
each a pre-norm residual sublayer.
"""

import torch
from torch import nn

from ..config import EncodingConfig
from .attention import MaskedAttention
from .embedding import Embeddings, sinusoid


class SeparableConv(nn.Module):
    """Depthwise then pointwise 1-D convolution over (B, L, H)."""

    def __init__(self, dim: int, kernel: int):
        super().__init__()
        self.depthwise = nn.Conv1d(dim, dim, kernel, padding=kernel // 2, groups=dim)
        self.pointwise = nn.Conv1d(dim, dim, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.pointwise(self.depthwise(x.transpose(1, 2))).transpose(1, 2)


class TextEncoder(nn.Module):
    def __init__(self, config: EncodingConfig, embeddings: Embeddings):
        super().__init__()
        dim = config.hidden_dim
        self.embeddings = embeddings
        self.convs = nn.ModuleList(
            SeparableConv(dim, config.conv_kernel) for _ in range(config.conv_layers)
        )
        self.conv_norms = nn.ModuleList(nn.LayerNorm(dim) for _ in self.convs)
        self.attention = MaskedAttention(dim, config.attention_heads)
        self.attention_norm = nn.LayerNorm(dim)
        self.feed_forward = nn.Sequential(
            nn.Linear(dim, dim), nn.ReLU(), nn.Linear(dim, dim)
        )
        self.feed_forward_norm = nn.LayerNorm(dim)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        """(B, L) token ids and validity mask to (B, L, H); padded rows are zero."""
        keep = mask.unsqueeze(-1).to(self.embeddings.project.weight.dtype)
        x = self.embeddings.text(ids)
        positions = torch.arange(ids.size(1), device=ids.device)
        x = (x + sinusoid(positions, x.size(-1)).to(x.dtype)) * keep

        for conv, norm in zip(self.convs, self.conv_norms):
            # padded rows must stay zero inside the kernel window
            x = x + torch.relu(conv(norm(x) * keep)) * keep
        x = x + self.attention(self.attention_norm(x), self.attention_norm(x), mask)
        x = x + self.feed_forward(self.feed_forward_norm(x))
        return x * keep
