# Filename: tests/model/test_encoders.py
"""Tests for the text encoder and the temporal graph encoder."""

import dataclasses

import torch

from eventgraph.graph import BeliefGraph, Edge, Node, Timestamp
from eventgraph.model import (
    Embeddings,
    GraphEncoder,
    TextEncoder,
    build_attribute_matrices,
)


def text_encoder(encoding, words) -> TextEncoder:
    torch.manual_seed(0)
    return TextEncoder(encoding, Embeddings(encoding, words)).eval()


def graph_encoder(encoding, words) -> GraphEncoder:
    torch.manual_seed(0)
    return GraphEncoder(encoding, Embeddings(encoding, words)).eval()


def pair(edges: list[Edge] = ()) -> BeliefGraph:
    nodes = [Node("apple", Timestamp(0, 1)), Node("table", Timestamp(0, 2))]
    return BeliefGraph(nodes, edges)


# --- Text ---


def test_text_shape(encoding, words):
    """(B, L) ids become (B, L, H)"""
    encoder = text_encoder(encoding, words)
    ids = torch.tensor([words.encode(["you", "see", "apple"])])

    output = encoder(ids, torch.ones_like(ids, dtype=torch.bool))

    assert output.shape == (1, 3, encoding.hidden_dim)


def test_text_padding_zero(encoding, words):
    """Padded positions come out as zero rows"""
    encoder = text_encoder(encoding, words)
    ids = torch.tensor([words.encode(["apple", "table"]) + [words.pad_id]])
    mask = torch.tensor([[True, True, False]])

    output = encoder(ids, mask)

    assert not output[0, 2].any()


def test_text_padding_invariant(encoding, words):
    """Extra padding does not change the encoding of real tokens"""
    encoder = text_encoder(encoding, words)
    tokens = words.encode(["you", "see", "apple", "on", "table"])
    short = torch.tensor([tokens])
    long = torch.tensor([tokens + [words.pad_id] * 4])
    mask = torch.tensor([[True] * 5 + [False] * 4])

    expected = encoder(short, torch.ones_like(short, dtype=torch.bool))
    output = encoder(long, mask)

    assert torch.allclose(output[:, :5], expected, atol=1e-5)


def test_text_order_matters(encoding, words):
    """Position encodings make token order visible"""
    encoder = text_encoder(encoding, words)
    mask = torch.ones(1, 2, dtype=torch.bool)

    forward = encoder(torch.tensor([words.encode(["apple", "table"])]), mask)
    backward = encoder(torch.tensor([words.encode(["table", "apple"])]), mask)

    assert not torch.allclose(forward[0, 0], backward[0, 1])


def test_text_fully_masked(encoding, words):
    """A row with no tokens at all stays finite and zero"""
    encoder = text_encoder(encoding, words)
    ids = torch.tensor([[words.pad_id]])

    output = encoder(ids, torch.zeros_like(ids, dtype=torch.bool))

    assert not output.any()


# --- Graph ---


def test_attribute_matrices(encoding, words):
    """Rows are [label; time] for nodes and edges, indices are (src, dst)"""
    graph = pair([Edge(0, 1, "on", Timestamp(0, 3))])
    embeddings = Embeddings(encoding, words)

    attrs = build_attribute_matrices(graph, embeddings)

    width = encoding.hidden_dim + encoding.temporal_dim
    assert attrs.edge_index.tolist() == [[0], [1]]
    assert attrs.edge_attrs.shape == (1, width)
    assert attrs.node_attrs.shape == (2, width)


def test_graph_shape(encoding, words):
    """One H-wide row per node"""
    encoder = graph_encoder(encoding, words)
    graph = pair([Edge(0, 1, "on", Timestamp(0, 3))])

    nodes = encoder(build_attribute_matrices(graph, encoder.embeddings))

    assert nodes.shape == (2, encoding.hidden_dim)


def test_empty_graph(encoding, words):
    """An empty graph has no rows"""
    encoder = graph_encoder(encoding, words)

    nodes = encoder(build_attribute_matrices(BeliefGraph(), encoder.embeddings))

    assert nodes.shape == (0, encoding.hidden_dim)


def test_all_empty_batch(encoding, words):
    """A batch of empty graphs pads to zero width"""
    encoder = graph_encoder(encoding, words)

    dense, mask = encoder.encode_graphs([BeliefGraph(), BeliefGraph()])

    assert mask.shape == (2, 0)
    assert dense.shape == (2, 0, encoding.hidden_dim)


def test_mixed_batch(encoding, words):
    """Batched rows match single-graph rows; empty graphs are fully masked"""
    encoder = graph_encoder(encoding, words)
    graph = pair([Edge(0, 1, "on", Timestamp(0, 3))])
    single = encoder(build_attribute_matrices(graph, encoder.embeddings))

    dense, mask = encoder.encode_graphs([BeliefGraph(), graph])

    assert torch.allclose(dense[1], single, atol=1e-6)
    assert mask.tolist() == [[False, False], [True, True]]


def test_messages_follow_edge_direction(encoding, words):
    """An edge changes its target's row and leaves its source's alone"""
    encoder = graph_encoder(encoding, words)
    isolated = encoder(build_attribute_matrices(pair(), encoder.embeddings))

    linked = encoder(
        build_attribute_matrices(
            pair([Edge(0, 1, "on", Timestamp(0, 3))]), encoder.embeddings
        )
    )

    assert not torch.allclose(linked[1], isolated[1])
    assert torch.allclose(linked[0], isolated[0], atol=1e-6)


def test_node_order_equivariant(encoding, words):
    """Reordering nodes reorders the output rows and nothing else"""
    encoder = graph_encoder(encoding, words)
    graph = pair([Edge(0, 1, "on", Timestamp(0, 3))])
    swapped = BeliefGraph(
        [graph.nodes[1], graph.nodes[0]], [Edge(1, 0, "on", Timestamp(0, 3))]
    )
    expected = encoder(build_attribute_matrices(graph, encoder.embeddings))

    output = encoder(build_attribute_matrices(swapped, encoder.embeddings))

    assert torch.allclose(output, expected[[1, 0]], atol=1e-6)


def test_node_time_matters(encoding, words):
    """The same label added at another time encodes differently"""
    encoder = graph_encoder(encoding, words)
    early = BeliefGraph([Node("apple", Timestamp(0, 1))])
    late = BeliefGraph([Node("apple", Timestamp(5, 1))])

    first = encoder(build_attribute_matrices(early, encoder.embeddings))
    second = encoder(build_attribute_matrices(late, encoder.embeddings))

    assert not torch.allclose(first, second)


def test_node_time_ignored_without_temporal(encoding, words):
    """With zero temporal encodings only the label counts"""
    encoder = graph_encoder(dataclasses.replace(encoding, temporal_mode="zero"), words)
    early = BeliefGraph([Node("apple", Timestamp(0, 1))])
    late = BeliefGraph([Node("apple", Timestamp(5, 1))])

    first = encoder(build_attribute_matrices(early, encoder.embeddings))
    second = encoder(build_attribute_matrices(late, encoder.embeddings))

    assert torch.allclose(first, second)


def test_graph_gradients_float64(encoding, words):
    """Analytic and numeric gradients of graph encoding agree"""
    encoder = graph_encoder(encoding, words).double()
    graph = pair([Edge(0, 1, "on", Timestamp(0, 3))])
    attrs = build_attribute_matrices(graph, encoder.embeddings)
    nodes = attrs.node_attrs.detach().double().requires_grad_()
    edges = attrs.edge_attrs.detach().double().requires_grad_()

    def run(nodes, edges):
        return encoder(dataclasses.replace(attrs, node_attrs=nodes, edge_attrs=edges))

    assert torch.autograd.gradcheck(run, (nodes, edges))
