# Filename: src/eventgraph/model/graph_encoder.py
"""
Temporal graph encoder.

Node and edge attribute rows are [label embedding; temporal embedding], built
fresh from the belief graph on every call so that rows track node-add and
node-delete exactly. A single-head TransformerConv passes messages along
directed edges (query from the target node, key and value from the source
node plus the edge attribute, with a root weight so isolated nodes keep a
self-transformed row), then a rectifier and a linear map down to H.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import torch
from torch import nn
from torch_geometric.data import Batch as GraphBatch
from torch_geometric.data import Data
from torch_geometric.nn import TransformerConv
from torch_geometric.utils import to_dense_batch

from ..config import EncodingConfig
from ..graph import BeliefGraph
from .embedding import Embeddings

log = logging.getLogger(__name__)


@dataclass
class AttributeMatrices:
    node_attrs: torch.Tensor  # (N, H + T)
    edge_attrs: torch.Tensor  # (E, H + T)
    edge_index: torch.Tensor  # (2, E), rows src and dst

    def to_data(self) -> Data:
        return Data(
            x=self.node_attrs,
            edge_index=self.edge_index,
            edge_attr=self.edge_attrs,
            num_nodes=self.node_attrs.size(0),
        )


def build_attribute_matrices(
    graph: BeliefGraph, embeddings: Embeddings
) -> AttributeMatrices:
    device = embeddings.project.weight.device
    node_attrs = torch.cat(
        [
            embeddings.labels([n.label for n in graph.nodes]),
            embeddings.timestamps([n.added_at for n in graph.nodes]),
        ],
        dim=-1,
    )
    edge_attrs = torch.cat(
        [
            embeddings.labels([e.label for e in graph.edges]),
            embeddings.timestamps([e.added_at for e in graph.edges]),
        ],
        dim=-1,
    )
    edge_index = torch.tensor(
        [[e.src for e in graph.edges], [e.dst for e in graph.edges]],
        dtype=torch.long,
        device=device,
    ).reshape(2, -1)
    return AttributeMatrices(node_attrs, edge_attrs, edge_index)


class GraphEncoder(nn.Module):
    def __init__(self, config: EncodingConfig, embeddings: Embeddings):
        super().__init__()
        width = config.hidden_dim + config.temporal_dim
        self.embeddings = embeddings
        self.conv = TransformerConv(
            width, width, heads=1, edge_dim=width, root_weight=True
        )
        self.output = nn.Linear(width, config.hidden_dim)

    def forward(self, attrs: AttributeMatrices) -> torch.Tensor:
        """Node embeddings (N, H) for one graph."""
        if attrs.node_attrs.size(0) == 0:
            return attrs.node_attrs.new_zeros(0, self.output.out_features)
        x = self.conv(attrs.node_attrs, attrs.edge_index, attrs.edge_attrs)
        return self.output(torch.relu(x))

    def encode_graphs(
        self, graphs: Sequence[BeliefGraph]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Encodes a batch of graphs into a padded (B, N_max, H) tensor and a
        (B, N_max) node mask. N_max is 0 when every graph is empty.
        """
        attrs = [build_attribute_matrices(g, self.embeddings) for g in graphs]
        device = self.embeddings.project.weight.device
        total = sum(a.node_attrs.size(0) for a in attrs)
        if total == 0:
            dim = self.output.out_features
            return (
                torch.zeros(
                    len(graphs), 0, dim, device=device, dtype=self.output.weight.dtype
                ),
                torch.zeros(len(graphs), 0, dtype=torch.bool, device=device),
            )

        batch = GraphBatch.from_data_list([a.to_data() for a in attrs])
        x = self.conv(batch.x, batch.edge_index, batch.edge_attr)
        x = self.output(torch.relu(x))
        dense, mask = to_dense_batch(x, batch.batch, batch_size=len(graphs))
        log.trace(f"Encoded {len(graphs)} graphs, {total} nodes")
        return dense, mask
