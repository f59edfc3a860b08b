# Filename: tests/model/test_aggregator.py
"""Tests for trilinear similarity and text-graph co-attention."""

import torch

from eventgraph.model import Aggregator, Trilinear, masked_softmax

DIM = 4


def aggregator() -> Aggregator:
    torch.manual_seed(0)
    return Aggregator(DIM)


def test_trilinear_matches_concatenation():
    """S[i, j] equals w . [a_i; b_j; a_i * b_j]"""
    torch.manual_seed(0)
    similarity = Trilinear(DIM)
    a, b = torch.randn(1, 2, DIM), torch.randn(1, 3, DIM)
    expected = torch.empty(1, 2, 3)
    for i in range(2):
        for j in range(3):
            row = torch.cat([a[0, i], b[0, j], a[0, i] * b[0, j]])
            expected[0, i, j] = row @ similarity.weight

    scores = similarity(a, b)

    assert torch.allclose(scores, expected, atol=1e-5)


def test_masked_softmax_ignores_masked():
    """Masked entries get no weight and the rest still sum to one"""
    scores = torch.tensor([[1.0, 2.0, 3.0]])
    mask = torch.tensor([[True, False, True]])

    weights = masked_softmax(scores, mask, dim=-1)

    assert weights[0, 1] == 0
    assert torch.isclose(weights.sum(), torch.tensor(1.0))


def test_masked_softmax_all_masked():
    """A slice with nothing unmasked is all zeros, not NaN"""
    scores = torch.tensor([[1.0, 2.0]])
    mask = torch.zeros(1, 2, dtype=torch.bool)

    weights = masked_softmax(scores, mask, dim=-1)

    assert weights.tolist() == [[0.0, 0.0]]


def test_coattend_shapes():
    """Text side keeps the text length, graph side the node count"""
    module = aggregator()
    text, nodes = torch.randn(2, 5, DIM), torch.randn(2, 3, DIM)
    text_mask = torch.ones(2, 5, dtype=torch.bool)
    node_mask = torch.ones(2, 3, dtype=torch.bool)

    text_out, graph_out = module.coattend(text, text_mask, nodes, node_mask)

    assert graph_out.shape == (2, 3, DIM)
    assert text_out.shape == (2, 5, DIM)


def test_single_token_single_node():
    """With one row each, P is the other side's row and Q is the own row"""
    module = aggregator()
    text, nodes = torch.randn(1, 1, DIM), torch.randn(1, 1, DIM)
    mask = torch.ones(1, 1, dtype=torch.bool)
    expected_text = module.combine(
        torch.cat([text, nodes, text * nodes, text * text], -1)
    )
    expected_graph = module.combine(
        torch.cat([nodes, text, nodes * text, nodes * nodes], -1)
    )

    text_out, graph_out = module.coattend(text, mask, nodes, mask)

    assert torch.allclose(graph_out, expected_graph, atol=1e-6)
    assert torch.allclose(text_out, expected_text, atol=1e-6)


def test_no_nodes():
    """With an empty graph P and Q vanish and the graph side has no rows"""
    module = aggregator()
    text = torch.randn(1, 3, DIM)
    text_mask = torch.ones(1, 3, dtype=torch.bool)
    zeros = torch.zeros_like(text)

    text_out, graph_out = module.coattend(
        text, text_mask, torch.zeros(1, 0, DIM), torch.zeros(1, 0, dtype=torch.bool)
    )

    assert graph_out.shape == (1, 0, DIM)
    assert torch.allclose(
        text_out, module.combine(torch.cat([text, zeros, zeros, zeros], -1)), atol=1e-6
    )


def test_padding_rows_zero():
    """Padded text positions and padded nodes come out as zero"""
    module = aggregator()
    text, nodes = torch.randn(1, 3, DIM), torch.randn(1, 2, DIM)
    text_mask = torch.tensor([[True, True, False]])
    node_mask = torch.tensor([[True, False]])

    text_out, graph_out = module.coattend(text, text_mask, nodes, node_mask)

    assert not graph_out[0, 1].any()
    assert not text_out[0, 2].any()


def test_padded_nodes_ignored():
    """A padded node does not change the text side"""
    module = aggregator()
    text, nodes = torch.randn(1, 3, DIM), torch.randn(1, 2, DIM)
    text_mask = torch.ones(1, 3, dtype=torch.bool)
    expected, _ = module.coattend(
        text, text_mask, nodes[:, :1], torch.ones(1, 1, dtype=torch.bool)
    )

    output, _ = module.coattend(text, text_mask, nodes, torch.tensor([[True, False]]))

    assert torch.allclose(output, expected, atol=1e-6)


def test_forward_memories_in_order():
    """Memories come out as obs->graph, graph->obs, action->graph, graph->action"""
    module = aggregator()
    obs, action = torch.randn(1, 4, DIM), torch.randn(1, 2, DIM)
    nodes = torch.randn(1, 3, DIM)
    obs_mask = torch.ones(1, 4, dtype=torch.bool)
    action_mask = torch.ones(1, 2, dtype=torch.bool)
    node_mask = torch.ones(1, 3, dtype=torch.bool)

    reps = module(obs, obs_mask, action, action_mask, nodes, node_mask)

    shapes = [tuple(memory.shape) for memory, _ in reps.memories()]
    assert shapes == [(1, 4, DIM), (1, 3, DIM), (1, 2, DIM), (1, 3, DIM)]


def test_gradients_float64():
    """Analytic and numeric gradients of co-attention agree"""
    module = aggregator().double()
    text = torch.randn(1, 3, DIM, dtype=torch.float64, requires_grad=True)
    nodes = torch.randn(1, 2, DIM, dtype=torch.float64, requires_grad=True)
    text_mask = torch.tensor([[True, True, False]])
    node_mask = torch.ones(1, 2, dtype=torch.bool)

    def run(text, nodes):
        return module.coattend(text, text_mask, nodes, node_mask)

    assert torch.autograd.gradcheck(run, (text, nodes))
