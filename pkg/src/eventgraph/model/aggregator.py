# Filename: src/eventgraph/model/aggregator.py
"""
Bidirectional co-attention between a text encoding and node embeddings.

With S the trilinear similarity between text rows and node rows, S_G its
softmax over the graph axis and S_O its softmax over the text axis:

    P = S_G . H_G
    Q = S_O . S_O^T . H_O
    out = Lin([H_O; P; H_O * P; H_O * Q])

The graph-side output mirrors this with the roles of text and graph swapped.
The same parameters serve the observation and the action pathway.
"""

from dataclasses import dataclass

import torch
from torch import nn

from .attention import masked_softmax


@dataclass
class AggregatedReps:
    obs_to_graph: torch.Tensor  # (B, L_O, H)
    graph_to_obs: torch.Tensor  # (B, N, H)
    action_to_graph: torch.Tensor  # (B, L_A, H)
    graph_to_action: torch.Tensor  # (B, N, H)
    obs_mask: torch.Tensor
    action_mask: torch.Tensor
    node_mask: torch.Tensor

    def memories(self) -> list[tuple[torch.Tensor, torch.Tensor]]:
        """(memory, key mask) pairs in decoder cross-attention order."""
        return [
            (self.obs_to_graph, self.obs_mask),
            (self.graph_to_obs, self.node_mask),
            (self.action_to_graph, self.action_mask),
            (self.graph_to_action, self.node_mask),
        ]


class Trilinear(nn.Module):
    """S[i, j] = w . [a_i; b_j; a_i * b_j], computed without the 3H concat."""

    def __init__(self, dim: int):
        super().__init__()
        self.left = nn.Linear(dim, 1, bias=False)
        self.right = nn.Linear(dim, 1, bias=False)
        self.product = nn.Parameter(torch.empty(dim))
        nn.init.uniform_(self.product, -(dim**-0.5), dim**-0.5)

    @property
    def weight(self) -> torch.Tensor:
        """The 3H weight vector w."""
        return torch.cat([self.left.weight[0], self.right.weight[0], self.product])

    def forward(self, a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
        """(B, m, H) and (B, n, H) to (B, m, n)."""
        return (
            self.left(a)
            + self.right(b).transpose(1, 2)
            + torch.bmm(a * self.product, b.transpose(1, 2))
        )


class Aggregator(nn.Module):
    def __init__(self, dim: int):
        super().__init__()
        self.similarity = Trilinear(dim)
        self.combine = nn.Linear(4 * dim, dim)

    def _fuse(
        self, base: torch.Tensor, p: torch.Tensor, q: torch.Tensor
    ) -> torch.Tensor:
        return self.combine(torch.cat([base, p, base * p, base * q], dim=-1))

    def coattend(
        self,
        text: torch.Tensor,
        text_mask: torch.Tensor,
        nodes: torch.Tensor,
        node_mask: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Returns (text_to_graph (B, L, H), graph_to_text (B, N, H)). Rows for
        padded positions are zero; with no nodes P is zero and the graph side
        has no rows.
        """
        pair_mask = text_mask.unsqueeze(2) & node_mask.unsqueeze(1)  # (B, L, N)
        scores = self.similarity(text, nodes)
        s_graph = masked_softmax(scores, pair_mask, dim=2)
        s_text = masked_softmax(scores, pair_mask, dim=1)

        p = torch.bmm(s_graph, nodes)
        q = torch.bmm(torch.bmm(s_text, s_text.transpose(1, 2)), text)
        text_out = self._fuse(text, p, q) * text_mask.unsqueeze(-1)

        p_graph = torch.bmm(s_text.transpose(1, 2), text)
        q_graph = torch.bmm(torch.bmm(s_graph.transpose(1, 2), s_graph), nodes)
        graph_out = self._fuse(nodes, p_graph, q_graph) * node_mask.unsqueeze(-1)
        return text_out, graph_out

    def forward(
        self,
        obs: torch.Tensor,
        obs_mask: torch.Tensor,
        action: torch.Tensor,
        action_mask: torch.Tensor,
        nodes: torch.Tensor,
        node_mask: torch.Tensor,
    ) -> AggregatedReps:
        obs_to_graph, graph_to_obs = self.coattend(obs, obs_mask, nodes, node_mask)
        action_to_graph, graph_to_action = self.coattend(
            action, action_mask, nodes, node_mask
        )
        return AggregatedReps(
            obs_to_graph=obs_to_graph,
            graph_to_obs=graph_to_obs,
            action_to_graph=action_to_graph,
            graph_to_action=graph_to_action,
            obs_mask=obs_mask,
            action_mask=action_mask,
            node_mask=node_mask,
        )
