# Filename: src/eventgraph/model/__init__.py
"""
eventgraph Model Package.

Text and temporal graph encoders, co-attention aggregation, the event
decoder with its head chain, and the assembled generator.
"""

from .aggregator import AggregatedReps, Aggregator, Trilinear
from .attention import MaskedAttention, masked_log_softmax, masked_softmax
from .decoder import Decoder, EventEmbedder
from .embedding import Embeddings, positional_encoding, sinusoid
from .graph_encoder import AttributeMatrices, GraphEncoder, build_attribute_matrices
from .heads import HeadOutputs, LabelHead, NodeHead, TypeHead
from .model import DecoderState, EventGraphModel
from .text_encoder import TextEncoder

__all__ = [
    "AggregatedReps",
    "Aggregator",
    "Trilinear",
    "MaskedAttention",
    "masked_log_softmax",
    "masked_softmax",
    "Decoder",
    "EventEmbedder",
    "Embeddings",
    "positional_encoding",
    "sinusoid",
    "AttributeMatrices",
    "GraphEncoder",
    "build_attribute_matrices",
    "HeadOutputs",
    "LabelHead",
    "NodeHead",
    "TypeHead",
    "DecoderState",
    "EventGraphModel",
    "TextEncoder",
]
