# Filename: src/eventgraph/model/heads.py
"""
The autoregressive head chain: event type, then source node, then destination
node, then label. Each head reads an autoregressive embedding that the heads
before it have updated.
"""

from dataclasses import dataclass

import torch
from torch import nn
from torch.nn import functional as F

from ..config import EncodingConfig
from ..graph import NUM_EVENT_KINDS
from .attention import masked_log_softmax


@dataclass
class HeadOutputs:
    """Log-probabilities of one decoding position, batched over examples."""

    kinds: torch.Tensor  # (B, 6)
    src: torch.Tensor  # (B, N)
    dst: torch.Tensor  # (B, N)
    labels: torch.Tensor  # (B, |labels|)

    def as_tuple(self) -> tuple[torch.Tensor, ...]:
        return self.kinds, self.src, self.dst, self.labels


def _classifier(in_dim: int, hidden: int, out_dim: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Linear(in_dim, hidden),
        nn.LayerNorm(hidden),
        nn.ReLU(),
        nn.Linear(hidden, hidden),
        nn.LayerNorm(hidden),
        nn.ReLU(),
        nn.Linear(hidden, out_dim),
    )


class TypeHead(nn.Module):
    def __init__(self, config: EncodingConfig):
        super().__init__()
        dim, auto = config.hidden_dim, config.auto_dim
        self.classify = _classifier(dim, dim, NUM_EVENT_KINDS)
        self.from_hidden = nn.Linear(dim, auto)
        self.kind_in = nn.Linear(NUM_EVENT_KINDS, auto)
        self.kind_out = nn.Linear(auto, auto)

    def forward(self, hidden: torch.Tensor) -> torch.Tensor:
        """Log-probabilities over event kinds, (B, H) to (B, 6)."""
        return torch.log_softmax(self.classify(hidden), dim=-1)

    def auto(self, hidden: torch.Tensor, kind: torch.Tensor) -> torch.Tensor:
        """Autoregressive embedding after choosing `kind`, (B, H_auto)."""
        onehot = F.one_hot(kind, NUM_EVENT_KINDS).to(hidden.dtype)
        kind_part = self.kind_out(torch.relu(self.kind_in(onehot)))
        return self.from_hidden(hidden) + kind_part


class NodeHead(nn.Module):
    """
    Query-key attention over node embeddings. Keys are a kernel-1
    convolution of the node rows; the query comes from the autoregressive
    embedding.
    """

    def __init__(self, config: EncodingConfig):
        super().__init__()
        auto, key = config.auto_dim, config.key_dim
        self.keys = nn.Conv1d(config.hidden_dim, key, kernel_size=1)
        self.query = nn.Sequential(
            nn.Linear(auto, auto), nn.ReLU(), nn.Linear(auto, key)
        )
        self.update = nn.Linear(key, auto, bias=False)

    def node_keys(self, nodes: torch.Tensor) -> torch.Tensor:
        """(B, N, H) node embeddings to (B, N, key_dim)."""
        return self.keys(nodes.transpose(1, 2)).transpose(1, 2)

    def forward(
        self, auto: torch.Tensor, keys: torch.Tensor, node_mask: torch.Tensor
    ) -> torch.Tensor:
        """Log-probabilities over nodes, (B, N). Raises with no nodes at all."""
        if keys.size(1) == 0:
            raise ValueError("node head invoked on a batch without nodes")
        scores = torch.bmm(keys, self.query(auto).unsqueeze(-1)).squeeze(-1)
        return masked_log_softmax(scores, node_mask)

    def advance(
        self,
        auto: torch.Tensor,
        keys: torch.Tensor,
        node_mask: torch.Tensor,
        chosen: torch.Tensor,
    ) -> torch.Tensor:
        """
        h + Lin(K^T . onehot(chosen) - mean key). Rows whose chosen index is
        negative, i.e. no node for this event kind, are returned unchanged.
        """
        if keys.size(1) == 0:
            return auto
        picked = chosen >= 0
        onehot = F.one_hot(chosen.clamp(min=0), keys.size(1)).to(keys.dtype)
        selected = torch.bmm(onehot.unsqueeze(1), keys).squeeze(1)
        valid = node_mask.unsqueeze(-1).to(keys.dtype)
        mean = (keys * valid).sum(dim=1) / valid.sum(dim=1).clamp(min=1)
        delta = self.update(selected - mean)
        return auto + delta * picked.unsqueeze(-1).to(delta.dtype)


class LabelHead(nn.Module):
    def __init__(self, config: EncodingConfig, num_labels: int):
        super().__init__()
        self.classify = _classifier(config.auto_dim, config.auto_dim, num_labels)

    def forward(self, auto: torch.Tensor) -> torch.Tensor:
        return torch.log_softmax(self.classify(auto), dim=-1)
