# Filename: src/eventgraph/graph/commands.py
"""
Conversion between label-level update commands and graph events.

Commands name nodes by label; events name them by position. Going from
commands to events decides which existing node a label refers to, going the
other way reads labels back off the graph as each event is applied.
"""

import logging
from collections.abc import Collection, Iterable
from dataclasses import dataclass
from typing import Literal

from ._event import EventKind, GraphEvent, Timestamp
from ._graph import (
    ApplyMode,
    BeliefGraph,
    DanglingIndexError,
    DuplicateEdgeError,
    MissingEdgeError,
    RdfTriple,
)
from .colors import (
    COLOR_RELATION,
    color_map,
    entity_keys,
    merge_colored_nodes,
    split_label,
)

log = logging.getLogger(__name__)

EXIT_LABELS = frozenset({"exit"})

Op = Literal["add", "delete"]


@dataclass(frozen=True, order=True)
class UpdateCommand:
    op: Op
    n1: str
    n2: str
    r: str

    def __post_init__(self):
        if self.op not in ("add", "delete"):
            raise ValueError(f"unknown command op {self.op!r}")
        if not (self.n1 and self.n2 and self.r):
            raise ValueError(f"empty label in {self!r}")

    @property
    def triple(self) -> RdfTriple:
        return RdfTriple(self.n1, self.n2, self.r)

    @classmethod
    def add(cls, n1: str, n2: str, r: str) -> "UpdateCommand":
        return cls("add", n1, n2, r)

    @classmethod
    def delete(cls, n1: str, n2: str, r: str) -> "UpdateCommand":
        return cls("delete", n1, n2, r)

    def __str__(self) -> str:
        return f"{self.op} , {self.n1} , {self.n2} , {self.r}"


def apply_commands(
    triples: Iterable[RdfTriple], commands: Iterable[UpdateCommand]
) -> set[RdfTriple]:
    """
    Label-level command semantics: add inserts a triple, delete removes it,
    and a command that changes nothing is ignored.
    """
    result = set(triples)
    for command in commands:
        if command.op == "add":
            result.add(command.triple)
        else:
            result.discard(command.triple)
    return result


def state_labels(triples: Iterable[RdfTriple]) -> frozenset[str]:
    """Objects of "is" relations: game states such as sliced or closed."""
    return frozenset(t.object for t in triples if t.relation == "is")


# --- Commands to events ---


class _Replay:
    """Builds events for one game step on a private copy of the graph."""

    def __init__(
        self,
        graph: BeliefGraph,
        t_g: int,
        t_e: int,
        fresh_labels: Collection[str],
        colors: Collection[str] | None,
    ):
        self.graph = graph.clone()
        self.t_g = t_g
        self.t_e = t_e
        self.fresh_labels = fresh_labels
        self.colors = colors or ()
        self.events: list[GraphEvent] = []

    def emit(self, event: GraphEvent):
        try:
            self.graph.apply_event(event)
        except DuplicateEdgeError:
            self.t_e -= 1
            raise
        self.events.append(event)
        log.trace(f"Emitted {event}")

    def ts(self) -> Timestamp:
        ts = Timestamp(self.t_g, self.t_e)
        self.t_e += 1
        return ts

    def keys(self) -> list[str | None]:
        if self.colors:
            return entity_keys(self.graph, self.colors)
        return [node.label for node in self.graph.nodes]

    def triples(self) -> set[RdfTriple]:
        if self.colors:
            return merge_colored_nodes(self.graph, self.colors)
        return self.graph.extract_triples()

    def find_node(self, label: str) -> int | None:
        if label in self.fresh_labels:
            return None
        keys = self.keys()
        return keys.index(label) if label in keys else None

    def node(self, label: str) -> int:
        """Index of the node a command endpoint refers to, adding it if needed."""
        index = self.find_node(label)
        if index is not None:
            return index
        colored = split_label(label, self.colors) if self.colors else None
        if colored is None:
            self.emit(GraphEvent.node_add(label, self.ts()))
            return len(self.graph) - 1
        color, item = colored
        self.emit(GraphEvent.node_add(item, self.ts()))
        self.emit(GraphEvent.node_add(color, self.ts()))
        index = len(self.graph) - 2
        self.emit(GraphEvent.edge_add(index, index + 1, COLOR_RELATION, self.ts()))
        return index

    def add(self, command: UpdateCommand):
        if command.triple in self.triples():
            log.debug(f"Skipping no-op command: {command}")
            return
        src = self.node(command.n1)
        dst = self.node(command.n2)
        self.emit(GraphEvent.edge_add(src, dst, command.r, self.ts()))

    def find_edge(self, command: UpdateCommand) -> tuple[int, int] | None:
        keys = self.keys()
        for edge in self.graph.edges:
            if (keys[edge.src], keys[edge.dst], edge.label) == (
                command.n1,
                command.n2,
                command.r,
            ):
                return edge.src, edge.dst
        return None

    def delete(self, command: UpdateCommand):
        found = self.find_edge(command)
        if found is None:
            raise MissingEdgeError(f"cannot resolve {command}")
        src, dst = found
        self.emit(GraphEvent.edge_delete(src, dst, self.ts()))

        candidates = {src, dst}
        colored = color_map(self.graph, self.colors) if self.colors else {}
        for index in (src, dst):
            if index in colored and self.graph.degree(index) == 1:
                color = colored[index]
                self.emit(GraphEvent.edge_delete(index, color, self.ts()))
                candidates.add(color)

        # Highest index first so the remaining indices stay valid
        for index in sorted(candidates, reverse=True):
            if self.graph.degree(index) == 0:
                self.emit(GraphEvent.node_delete(index, self.ts()))


def commands_to_events(
    commands: Iterable[UpdateCommand],
    graph: BeliefGraph,
    t_g: int,
    *,
    t_e_start: int = 0,
    mode: ApplyMode = "strict",
    fresh_labels: Collection[str] = EXIT_LABELS,
    colors: Collection[str] | None = None,
) -> list[GraphEvent]:
    """
    Turns sorted commands into the events that make `graph` follow them.

    Labels in `fresh_labels` (exits and states) get a new node per
    attachment, every other label reuses an existing node. Deleting an edge
    also deletes endpoints it leaves isolated. With `colors`, labels like
    "purple potato" become an item node joined to a color node.
    `graph` is not modified.
    """
    replay = _Replay(graph, t_g, t_e_start, fresh_labels, colors)
    for command in commands:
        try:
            if command.op == "add":
                replay.add(command)
            else:
                replay.delete(command)
        except (MissingEdgeError, DuplicateEdgeError) as e:
            if mode == "strict":
                raise
            log.warning(f"Dropping command at step {t_g}: {e}")
    return replay.events


# --- Events to commands ---


def events_to_commands(
    events: Iterable[GraphEvent],
    graph: BeliefGraph,
    mode: ApplyMode = "strict",
) -> set[UpdateCommand]:
    """
    Projects edge events onto label-level commands, replaying `events` on a
    copy of `graph` so every index is read against the state it refers to.
    """
    graph = graph.clone()
    commands = set()
    for event in events:
        try:
            command = _command_for(event, graph)
            graph.apply_event(event)
        except (DanglingIndexError, DuplicateEdgeError, MissingEdgeError) as e:
            if mode == "strict":
                raise
            log.debug(f"Skipping unresolvable event {event}: {e}")
            continue
        if command is not None:
            commands.add(command)
    return commands


def _command_for(event: GraphEvent, graph: BeliefGraph) -> UpdateCommand | None:
    if event.kind == EventKind.EDGE_ADD:
        src, dst = _labels(graph, event.src, event.dst)
        return UpdateCommand.add(src, dst, event.label)
    if event.kind == EventKind.EDGE_DELETE:
        src, dst = _labels(graph, event.src, event.dst)
        position = graph.find_edge(event.src, event.dst)
        if position is None:
            raise MissingEdgeError(f"no edge ({event.src}, {event.dst})")
        return UpdateCommand.delete(src, dst, graph.edges[position].label)
    return None


def _labels(graph: BeliefGraph, *indices: int) -> list[str]:
    n = len(graph)
    for index in indices:
        if not 0 <= index < n:
            raise DanglingIndexError(f"node {index} out of range for {n} nodes")
    return [graph.nodes[index].label for index in indices]
