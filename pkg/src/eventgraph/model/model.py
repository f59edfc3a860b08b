# Filename: src/eventgraph/model/model.py
"""
The complete event generator: encoders, aggregator, decoder and heads, with
a teacher-forced pass for training and greedy constrained generation for
inference.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from ..config import EncodingConfig
from ..data.batch import Batch
from ..data.vocab import Vocabulary
from ..graph import (
    MASK_TABLE,
    BeliefGraph,
    EventKind,
    GraphEvent,
    Timestamp,
    replay,
)
from .aggregator import AggregatedReps, Aggregator
from .decoder import Decoder, EventEmbedder
from .embedding import Embeddings
from .graph_encoder import GraphEncoder
from .heads import HeadOutputs, LabelHead, NodeHead, TypeHead
from .text_encoder import TextEncoder

log = logging.getLogger(__name__)

# Chooses an argument from (B, n) log-probabilities; returns (B,) indices.
Picker = Callable[[str, torch.Tensor], torch.Tensor]


@dataclass
class DecoderState:
    """Running state of one generation."""

    graph: BeliefGraph
    events: list[GraphEvent] = field(default_factory=list)
    embedded: list[torch.Tensor] = field(default_factory=list)
    hidden: torch.Tensor | None = None
    auto: torch.Tensor | None = None

    @property
    def generated(self) -> list[GraphEvent]:
        return [e for e in self.events if not e.is_marker]


class EventGraphModel(nn.Module):
    def __init__(
        self,
        config: EncodingConfig,
        words: Vocabulary,
        labels: Vocabulary,
        vectors: np.ndarray | None = None,
        tokenizer: str = "rule",
        seed: int = 0,
    ):
        super().__init__()
        self.config = config
        self.words = words
        self.labels = labels
        self.embeddings = Embeddings(config, words, vectors, tokenizer, seed)
        self.text_encoder = TextEncoder(config, self.embeddings)
        self.graph_encoder = GraphEncoder(config, self.embeddings)
        self.aggregator = Aggregator(config.hidden_dim)
        self.event_embedder = EventEmbedder(config, self.embeddings)
        self.decoder = Decoder(config)
        self.type_head = TypeHead(config)
        self.src_head = NodeHead(config)
        self.dst_head = NodeHead(config)
        self.label_head = LabelHead(config, len(labels))

    @property
    def device(self) -> torch.device:
        return self.embeddings.project.weight.device

    # --- Encoding ---

    def encode_text(self, tokens: Sequence[str]) -> torch.Tensor:
        """Contextual encoding of one token sequence, (L, H); (0, H) if empty."""
        ids, mask = self._token_tensor(tokens)
        return self.text_encoder(ids, mask)[0, : len(tokens)]

    def _token_tensor(
        self, tokens: Sequence[str]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        ids = torch.full(
            (1, max(1, len(tokens))), self.words.pad_id, dtype=torch.long
        )
        mask = torch.zeros(ids.shape, dtype=torch.bool)
        if tokens:
            ids[0, : len(tokens)] = torch.tensor(self.words.encode(tokens))
            mask[0, : len(tokens)] = True
        return ids.to(self.device), mask.to(self.device)

    def memories(
        self,
        obs: torch.Tensor,
        obs_mask: torch.Tensor,
        action: torch.Tensor,
        action_mask: torch.Tensor,
        graphs: Sequence[BeliefGraph],
    ) -> tuple[AggregatedReps, torch.Tensor]:
        """Aggregated memories and the padded node embeddings they came from."""
        nodes, node_mask = self.graph_encoder.encode_graphs(graphs)
        reps = self.aggregator(obs, obs_mask, action, action_mask, nodes, node_mask)
        return reps, nodes

    # --- Heads ---

    def run_heads(
        self,
        hidden: torch.Tensor,
        nodes: torch.Tensor,
        node_mask: torch.Tensor,
        pick: Picker,
    ) -> tuple[HeadOutputs, torch.Tensor]:
        """
        Runs the chain type -> source -> destination -> label. `pick` turns
        each head's log-probabilities into the argument fed to the next one.
        Returns the head outputs and the final autoregressive embedding.
        """
        kind_logp = self.type_head(hidden)
        kind = pick("type", kind_logp)
        auto = self.type_head.auto(hidden, kind)

        batch = hidden.size(0)
        if nodes.size(1) == 0:
            empty = hidden.new_zeros(batch, 0)
            src_logp, dst_logp = empty, empty
        else:
            src_keys = self.src_head.node_keys(nodes)
            src_logp = self.src_head(auto, src_keys, node_mask)
            auto = self.src_head.advance(
                auto, src_keys, node_mask, pick("src", src_logp)
            )
            dst_keys = self.dst_head.node_keys(nodes)
            dst_logp = self.dst_head(auto, dst_keys, node_mask)
            auto = self.dst_head.advance(
                auto, dst_keys, node_mask, pick("dst", dst_logp)
            )
        label_logp = self.label_head(auto)
        pick("label", label_logp)
        return HeadOutputs(kind_logp, src_logp, dst_logp, label_logp), auto

    # --- Teacher forcing ---

    def teacher_forced(self, batch: Batch) -> list[HeadOutputs]:
        """
        Head outputs for target positions 1..T-1, each predicted from the
        gold events before it, with the graph updated by those events and
        every head conditioned on the gold arguments of the heads before it.
        """
        obs = self.text_encoder(batch.obs, batch.obs_mask)
        action = self.text_encoder(batch.action, batch.action_mask)

        states: list[list[BeliefGraph]] = []
        embedded = []
        for prior, targets in zip(batch.prior_events, batch.target_events):
            graph = replay(prior)
            embedded.append(self.event_embedder(targets, graph))
            history = [graph.clone()]
            for event in targets:
                graph.apply_event(event)
                history.append(graph.clone())
            states.append(history)
        events = nn.utils.rnn.pad_sequence(embedded, batch_first=True)
        event_mask = nn.utils.rnn.pad_sequence(
            [torch.ones(len(e), dtype=torch.bool) for e in embedded],
            batch_first=True,
        ).to(self.device)

        gold = {"type": batch.kinds, "src": batch.src, "dst": batch.dst}
        outputs = []
        for k in range(1, batch.kinds.size(1)):
            graphs = [history[min(k, len(history) - 1)] for history in states]
            reps, nodes = self.memories(
                obs, batch.obs_mask, action, batch.action_mask, graphs
            )
            hidden = self.decoder(events[:, :k], event_mask[:, :k], reps)[:, k - 1]

            def pick(head: str, logp: torch.Tensor, k: int = k) -> torch.Tensor:
                return gold[head][:, k] if head in gold else logp.argmax(dim=-1)

            step, _ = self.run_heads(hidden, nodes, reps.node_mask, pick)
            outputs.append(step)
        return outputs

    # --- Generation ---

    def _constrained_pick(self, num_nodes: int, force_end: bool) -> Picker:
        def pick(head: str, logp: torch.Tensor) -> torch.Tensor:
            allowed = torch.ones_like(logp, dtype=torch.bool)
            if head == "type":
                allowed[:, EventKind.START] = False
                for kind in EventKind:
                    if force_end and kind != EventKind.END:
                        allowed[:, kind] = False
                    if num_nodes == 0 and MASK_TABLE[kind].needs_nodes:
                        allowed[:, kind] = False
            elif head == "label":
                allowed[:, sorted(self.labels.reserved)] = False
            scores = logp.masked_fill(~allowed, float("-inf"))
            return scores.argmax(dim=-1)

        return pick

    @torch.no_grad()
    def generate(
        self,
        obs_tokens: Sequence[str],
        action_tokens: Sequence[str],
        graph: BeliefGraph,
        t_g: int,
        max_events: int = 100,
    ) -> DecoderState:
        """
        Greedy generation from `graph` (left untouched). The graph copy is
        updated after every event and re-encoded before the next one.
        """
        obs, obs_mask = self._token_tensor(obs_tokens)
        action, action_mask = self._token_tensor(action_tokens)
        obs = self.text_encoder(obs, obs_mask)
        action = self.text_encoder(action, action_mask)

        state = DecoderState(graph=graph.clone())
        start = GraphEvent.start(t_g)
        state.events.append(start)
        state.embedded.append(self.event_embedder.embed_event(start, state.graph))

        while True:
            t_e = len(state.events)
            reps, nodes = self.memories(
                obs, obs_mask, action, action_mask, [state.graph]
            )
            events = torch.stack(state.embedded).unsqueeze(0)
            event_mask = torch.ones(
                events.shape[:2], dtype=torch.bool, device=self.device
            )
            state.hidden = self.decoder(events, event_mask, reps)[:, -1]

            chosen: dict[str, int] = {}
            inner = self._constrained_pick(len(state.graph), t_e > max_events)

            def pick(head: str, logp: torch.Tensor) -> torch.Tensor:
                if head in ("src", "dst"):
                    # arguments the chosen kind lacks stay unchosen, as in training
                    argument = MASK_TABLE[EventKind(chosen["type"])]
                    if not getattr(argument, head):
                        return torch.full_like(logp[:, 0], -1, dtype=torch.long)
                index = inner(head, logp)
                chosen[head] = int(index[0])
                return index

            _, state.auto = self.run_heads(state.hidden, nodes, reps.node_mask, pick)
            kind = EventKind(chosen["type"])
            if kind == EventKind.END:
                state.events.append(GraphEvent.end(t_g, t_e))
                break

            argument = MASK_TABLE[kind]
            event = GraphEvent(
                kind,
                Timestamp(t_g, t_e),
                src=chosen["src"] if argument.src else None,
                dst=chosen["dst"] if argument.dst else None,
                label=self.labels.itos[chosen["label"]] if argument.label else None,
            )
            state.embedded.append(self.event_embedder.embed_event(event, state.graph))
            state.events.append(event)
            state.graph.apply_event(event, mode="lenient")
            log.trace(f"Generated {event}, graph version {state.graph.version}")

        log.debug(f"Generated {len(state.generated)} events at t_g={t_g}")
        return state

    def generate_events(
        self,
        obs_tokens: Sequence[str],
        action_tokens: Sequence[str],
        graph: BeliefGraph,
        t_g: int,
        max_events: int = 100,
    ) -> list[GraphEvent]:
        """Generated events for one game step, start and end markers excluded."""
        state = self.generate(obs_tokens, action_tokens, graph, t_g, max_events)
        return state.generated
