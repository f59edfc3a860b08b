# Filename: src/eventgraph/evaluation.py
"""
Teacher-forcing and free-run F1.

TF F1 decodes each datapoint from its gold prior graph and compares the
label-level commands of the generated events with the gold commands. FR F1
runs a whole trajectory from an empty graph on the generator's own output
and compares the final triples with the gold ones, folding colored items
back into single entities in multi mode. Both are macro averages; pooled
(micro) counts are reported next to them.
"""

import json
import logging
from collections.abc import Collection, Hashable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

from .data.preprocess import Datapoint, Trajectory, unique_datapoints
from .graph import (
    DEFAULT_COLORS,
    BeliefGraph,
    GraphEvent,
    RdfTriple,
    events_to_commands,
    merge_colored_nodes,
    replay,
)
from .util.atomic import atomic_open

log = logging.getLogger(__name__)

REPORT_VERSION = 1


class EventGenerator(Protocol):
    def generate_events(
        self,
        obs_tokens: Sequence[str],
        action_tokens: Sequence[str],
        graph: BeliefGraph,
        t_g: int,
        max_events: int = 100,
    ) -> list[GraphEvent]: ...


# --- Set F1 ---


@dataclass
class Counts:
    """Pooled true positives and set sizes, for micro averaging."""

    overlap: int = 0
    predicted: int = 0
    gold: int = 0

    def add(self, predicted: Collection[Hashable], gold: Collection[Hashable]):
        self.overlap += len(set(predicted) & set(gold))
        self.predicted += len(predicted)
        self.gold += len(gold)

    @property
    def f1(self) -> float:
        return _f1(self.overlap, self.predicted, self.gold)


def _f1(overlap: int, predicted: int, gold: int) -> float:
    if predicted == 0 and gold == 0:
        return 1.0
    if overlap == 0:
        return 0.0
    precision, recall = overlap / predicted, overlap / gold
    return 2 * precision * recall / (precision + recall)


def set_f1(predicted: Collection[Hashable], gold: Collection[Hashable]) -> float:
    """F1 of two sets; two empty sets score 1.0."""
    predicted, gold = set(predicted), set(gold)
    return _f1(len(predicted & gold), len(predicted), len(gold))


# --- Oracle ---


class GoldReplay:
    """
    A generator that answers with the gold events of the datapoint whose
    text, game step and prior graph match the request.
    """

    def __init__(self, datapoints: Sequence[Datapoint]):
        self._events: dict[tuple, list[GraphEvent]] = {}
        for datapoint in datapoints:
            key = self._key(
                datapoint.obs_tokens,
                datapoint.action_tokens,
                datapoint.prior_graph(),
                datapoint.t_g,
            )
            events = [e for e in datapoint.target_events if not e.is_marker]
            self._events[key] = events

    @staticmethod
    def _key(obs_tokens, action_tokens, graph: BeliefGraph, t_g: int) -> tuple:
        return (
            tuple(obs_tokens),
            tuple(action_tokens),
            t_g,
            frozenset(graph.extract_triples()),
        )

    def generate_events(
        self,
        obs_tokens: Sequence[str],
        action_tokens: Sequence[str],
        graph: BeliefGraph,
        t_g: int,
        max_events: int = 100,
    ) -> list[GraphEvent]:
        key = self._key(obs_tokens, action_tokens, graph, t_g)
        events = self._events.get(key)
        if events is None:
            log.warning(f"No gold events for step {t_g} from a {len(graph)}-node graph")
            return []
        return list(events[:max_events])


# --- Metrics ---


@dataclass
class Scores:
    macro: float
    micro: float
    per_item: dict[str, float] = field(default_factory=dict)


def tf_f1(
    generator: EventGenerator,
    datapoints: Sequence[Datapoint],
    max_events: int = 100,
) -> Scores:
    counts = Counts()
    per_item = {}
    for datapoint in datapoints:
        graph = datapoint.prior_graph()
        events = generator.generate_events(
            datapoint.obs_tokens,
            datapoint.action_tokens,
            graph,
            datapoint.t_g,
            max_events,
        )
        predicted = events_to_commands(events, graph, mode="lenient")
        gold = set(datapoint.target_commands)
        per_item[datapoint.id] = set_f1(predicted, gold)
        counts.add(predicted, gold)
        log.trace(f"TF {datapoint.id}: {per_item[datapoint.id]:.3f}")
    macro = sum(per_item.values()) / len(per_item) if per_item else 0.0
    log.info(f"TF F1 over {len(per_item)} datapoints: {macro:.4f}")
    return Scores(macro, counts.f1, per_item)


def free_run(
    generator: EventGenerator,
    trajectory: Trajectory,
    max_events: int = 100,
) -> BeliefGraph:
    """Runs a trajectory from an empty graph on the generator's own events."""
    graph = BeliefGraph()
    for datapoint in trajectory.datapoints:
        events = generator.generate_events(
            datapoint.obs_tokens,
            datapoint.action_tokens,
            graph,
            datapoint.t_g,
            max_events,
        )
        graph = replay(events, graph, mode="lenient")
    return graph


def trajectory_id(trajectory: Trajectory) -> str:
    return f"{trajectory.game_id}/{trajectory.walkthrough_step}"


def fr_f1(
    generator: EventGenerator,
    trajectories: Sequence[Trajectory],
    multi_mode: bool = False,
    max_events: int = 100,
    colors: Collection[str] = DEFAULT_COLORS,
) -> Scores:
    counts = Counts()
    per_item = {}
    for trajectory in trajectories:
        graph = free_run(generator, trajectory, max_events)
        predicted: set[RdfTriple]
        if multi_mode:
            predicted = merge_colored_nodes(graph, colors)
        else:
            predicted = graph.extract_triples()
        name = trajectory_id(trajectory)
        per_item[name] = set_f1(predicted, trajectory.final_triples)
        counts.add(predicted, trajectory.final_triples)
        log.debug(f"FR {name}: {per_item[name]:.3f}")
    macro = sum(per_item.values()) / len(per_item) if per_item else 0.0
    log.info(f"FR F1 over {len(per_item)} trajectories: {macro:.4f}")
    return Scores(macro, counts.f1, per_item)


# --- Report ---


@dataclass
class EvalReport:
    tf: Scores | None
    fr: Scores | None
    multi_mode: bool
    datapoints: int
    trajectories: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "multi_mode": self.multi_mode,
            "tf_f1": self.tf.macro if self.tf else None,
            "tf_f1_micro": self.tf.micro if self.tf else None,
            "fr_f1": self.fr.macro if self.fr else None,
            "fr_f1_micro": self.fr.micro if self.fr else None,
            "counts": {
                "datapoints": self.datapoints,
                "trajectories": self.trajectories,
            },
            "per_datapoint": self.tf.per_item if self.tf else {},
            "per_trajectory": self.fr.per_item if self.fr else {},
        }

    def save(self, path: str | Path):
        with atomic_open(path, encoding="utf-8") as writer:
            json.dump(self.to_dict(), writer, indent=2, sort_keys=True)
        log.info(f"Report written to {path}")


def evaluate(
    generator: EventGenerator,
    trajectories: Sequence[Trajectory],
    metric: str = "both",
    multi_mode: bool = False,
    max_events: int = 100,
    colors: Collection[str] = DEFAULT_COLORS,
) -> EvalReport:
    """
    Scores `generator` on a split. Multi mode never reports TF F1, since the
    gold commands name colored items that the events split in two.
    """
    if metric not in ("tf", "fr", "both"):
        raise ValueError(f"unknown metric {metric!r}")
    datapoints = unique_datapoints(trajectories)
    tf = None
    if metric != "fr" and not multi_mode:
        tf = tf_f1(generator, datapoints, max_events)
    fr = None
    if metric != "tf":
        fr = fr_f1(generator, trajectories, multi_mode, max_events, colors)
    return EvalReport(
        tf=tf,
        fr=fr,
        multi_mode=multi_mode,
        datapoints=len(datapoints),
        trajectories=len(trajectories),
    )
