# Filename: src/eventgraph/model/decoder.py
"""
Event embeddings and the event decoder.

An event embeds as [type; source label; destination label; event label],
with the label segments zeroed according to MASK_TABLE, the same table that
decides which heads a target event trains. Node labels are looked up in the
graph as it was just before the event.
"""

import logging
from collections.abc import Sequence

import torch
from torch import nn

from ..config import EncodingConfig
from ..graph import (
    MASK_TABLE,
    NUM_EVENT_KINDS,
    BeliefGraph,
    DanglingIndexError,
    EventKind,
    GraphEvent,
)
from .aggregator import AggregatedReps
from .attention import MaskedAttention
from .embedding import Embeddings, sinusoid

log = logging.getLogger(__name__)


def _node_label(graph: BeliefGraph, index: int | None) -> str | None:
    if index is None:
        return None
    if not 0 <= index < len(graph):
        raise DanglingIndexError(f"node {index} out of range for {len(graph)} nodes")
    return graph.nodes[index].label


class EventEmbedder(nn.Module):
    def __init__(self, config: EncodingConfig, embeddings: Embeddings):
        super().__init__()
        self.embeddings = embeddings
        self.types = nn.Embedding(NUM_EVENT_KINDS, config.type_dim)
        table = [
            [float(flag) for flag in MASK_TABLE[kind]] for kind in sorted(EventKind)
        ]
        self.register_buffer("segment_mask", torch.tensor(table), persistent=False)

    def _embed(
        self,
        kinds: list[EventKind],
        src_labels: list[str | None],
        dst_labels: list[str | None],
        labels: list[str | None],
    ) -> torch.Tensor:
        device = self.types.weight.device
        kind_ids = torch.tensor(
            [int(k) for k in kinds], dtype=torch.long, device=device
        )
        mask = self.segment_mask[kind_ids].to(self.types.weight.dtype)
        return torch.cat(
            [
                self.types(kind_ids),
                self.embeddings.labels(src_labels) * mask[:, 0:1],
                self.embeddings.labels(dst_labels) * mask[:, 1:2],
                self.embeddings.labels(labels) * mask[:, 2:3],
            ],
            dim=-1,
        )

    def embed_event(self, event: GraphEvent, graph: BeliefGraph) -> torch.Tensor:
        """One event against the graph it applies to, (H_type + 3H,)."""
        return self._embed(
            [event.kind],
            [_node_label(graph, event.src)],
            [_node_label(graph, event.dst)],
            [event.label],
        )[0]

    def forward(
        self, events: Sequence[GraphEvent], graph: BeliefGraph
    ) -> torch.Tensor:
        """
        Embeds an event sequence starting from `graph`, applying each event
        to a copy before embedding the next. (T, H_type + 3H).
        """
        state = graph.clone()
        src_labels, dst_labels = [], []
        for event in events:
            src_labels.append(_node_label(state, event.src))
            dst_labels.append(_node_label(state, event.dst))
            state.apply_event(event)
        return self._embed(
            [e.kind for e in events], src_labels, dst_labels, [e.label for e in events]
        )


class Decoder(nn.Module):
    """
    One post-norm block: causal self-attention, a cross-attention per
    aggregated memory (obs-to-graph, graph-to-obs, action-to-graph,
    graph-to-action), then a feed-forward layer.
    """

    def __init__(self, config: EncodingConfig):
        super().__init__()
        dim, heads = config.hidden_dim, config.attention_heads
        self.input = nn.Linear(config.event_dim, dim)
        self.self_attention = MaskedAttention(dim, heads)
        self.self_norm = nn.LayerNorm(dim)
        self.cross_attention = nn.ModuleList(
            MaskedAttention(dim, heads) for _ in range(4)
        )
        self.cross_norms = nn.ModuleList(nn.LayerNorm(dim) for _ in range(4))
        self.feed_forward = nn.Sequential(
            nn.Linear(dim, dim), nn.ReLU(), nn.Linear(dim, dim)
        )
        self.feed_forward_norm = nn.LayerNorm(dim)

    def forward(
        self,
        events: torch.Tensor,
        event_mask: torch.Tensor,
        memories: AggregatedReps,
    ) -> torch.Tensor:
        """(B, T, H_type + 3H) event embeddings to (B, T, H) hidden states."""
        positions = torch.arange(events.size(1), device=events.device)
        x = self.input(events)
        x = x + sinusoid(positions, x.size(-1)).to(x.dtype)

        x = self.self_norm(x + self.self_attention(x, x, event_mask, causal=True))
        for attention, norm, (memory, mask) in zip(
            self.cross_attention, self.cross_norms, memories.memories()
        ):
            x = norm(x + attention(x, memory, mask))
        x = self.feed_forward_norm(x + self.feed_forward(x))
        return x * event_mask.unsqueeze(-1).to(x.dtype)
