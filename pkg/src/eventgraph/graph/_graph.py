# Filename: src/eventgraph/graph/_graph.py
"""
Contains the BeliefGraph class: a labeled directed graph whose structure is
changed only by applying graph events.
Node indices are positional and compacted on deletion.
"""

import json
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Any, Literal

from upd8 import Versioned, changes, waits

from ._event import EventKind, GraphEvent, GraphEventError, Timestamp

log = logging.getLogger("eventgraph.graph")

ApplyMode = Literal["strict", "lenient"]


class DanglingIndexError(GraphEventError, IndexError):
    """Event refers to a node index that does not exist."""


class DuplicateEdgeError(GraphEventError):
    """edge-add for an ordered pair that already has an edge."""


class MissingEdgeError(GraphEventError, KeyError):
    """edge-delete for an ordered pair with no edge."""


@dataclass(frozen=True)
class Node:
    label: str
    added_at: Timestamp


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: str
    added_at: Timestamp


@dataclass(frozen=True, order=True)
class RdfTriple:
    """Label-level (subject, object, relation) triple."""

    subject: str
    object: str
    relation: str

    def __post_init__(self):
        if not (self.subject and self.object and self.relation):
            raise ValueError(f"empty field in triple {self!r}")

    def __str__(self) -> str:
        return f"({self.subject}, {self.object}, {self.relation})"


class BeliefGraph(Versioned):
    """
    Mutable labeled multigraph state machine.
    Inherits from Versioned so every structural change bumps `version`.
    """

    def __init__(
        self,
        nodes: Iterable[Node] = (),
        edges: Iterable[Edge] = (),
    ):
        super().__init__()
        self.nodes: list[Node] = list(nodes)
        self.edges: list[Edge] = list(edges)

    # --- Event application ---

    def apply_event(
        self, event: GraphEvent, mode: ApplyMode = "strict"
    ) -> "BeliefGraph":
        """
        Applies one event in place and returns self.
        Lenient mode ignores inapplicable events; malformed events raise in both.
        A skipped event leaves `version` unchanged.
        """
        event.validate()
        try:
            self._check(event)
        except (DanglingIndexError, DuplicateEdgeError, MissingEdgeError) as e:
            if mode == "strict":
                raise
            log.debug(f"Ignoring inapplicable event {event}: {e}")
            return self
        if event.kind not in (EventKind.START, EventKind.END):
            self._apply(event)
        return self

    def apply_events(
        self, events: Iterable[GraphEvent], mode: ApplyMode = "strict"
    ) -> "BeliefGraph":
        for event in events:
            self.apply_event(event, mode)
        return self

    @waits
    def _check(self, event: GraphEvent):
        """Raises if `event` cannot apply to the current structure."""
        kind = event.kind
        if kind == EventKind.NODE_DELETE:
            self._check_index(event.src)
        elif kind in (EventKind.EDGE_ADD, EventKind.EDGE_DELETE):
            self._check_index(event.src)
            self._check_index(event.dst)
            exists = self._edge_position(event.src, event.dst) is not None
            if kind == EventKind.EDGE_ADD and exists:
                raise DuplicateEdgeError(f"edge ({event.src}, {event.dst}) exists")
            if kind == EventKind.EDGE_DELETE and not exists:
                raise MissingEdgeError(f"no edge ({event.src}, {event.dst})")

    @changes
    def _apply(self, event: GraphEvent):
        kind = event.kind
        if kind == EventKind.NODE_ADD:
            self.nodes.append(Node(event.label, event.ts))
        elif kind == EventKind.NODE_DELETE:
            self._remove_node(event.src)
        elif kind == EventKind.EDGE_ADD:
            self.edges.append(Edge(event.src, event.dst, event.label, event.ts))
        elif kind == EventKind.EDGE_DELETE:
            del self.edges[self._edge_position(event.src, event.dst)]

    def _check_index(self, index: int):
        if not 0 <= index < len(self.nodes):
            raise DanglingIndexError(
                f"node {index} out of range for {len(self.nodes)} nodes"
            )

    def _remove_node(self, index: int):
        del self.nodes[index]

        # Drop incident edges and shift higher indices down by one
        def shift(i: int) -> int:
            return i - 1 if i > index else i

        self.edges = [
            Edge(shift(e.src), shift(e.dst), e.label, e.added_at)
            for e in self.edges
            if e.src != index and e.dst != index
        ]

    # --- Queries ---

    @waits
    def find_edge(self, src: int, dst: int) -> int | None:
        """Position of the edge (src, dst) in `edges`, or None."""
        return self._edge_position(src, dst)

    def _edge_position(self, src: int, dst: int) -> int | None:
        for position, edge in enumerate(self.edges):
            if edge.src == src and edge.dst == dst:
                return position
        return None

    @waits
    def degree(self, index: int) -> int:
        return sum((e.src == index) + (e.dst == index) for e in self.edges)

    @waits
    def out_edges(self, index: int) -> list[Edge]:
        return [e for e in self.edges if e.src == index]

    @waits
    def extract_triples(self) -> set[RdfTriple]:
        """One triple per edge using current node labels."""
        return {
            RdfTriple(self.nodes[e.src].label, self.nodes[e.dst].label, e.label)
            for e in self.edges
        }

    @waits
    def __len__(self) -> int:
        return len(self.nodes)

    @waits
    def __iter__(self) -> Iterator[Node]:
        yield from list(self.nodes)

    @waits
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BeliefGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    __hash__ = None

    def __repr__(self) -> str:
        return f"BeliefGraph(nodes={len(self.nodes)}, edges={len(self.edges)})"

    # --- Copying ---

    @waits
    def clone(self) -> "BeliefGraph":
        """Independent copy; Node and Edge are immutable, lists are copied."""
        return BeliefGraph(self.nodes, self.edges)

    def __copy__(self) -> "BeliefGraph":
        return self.clone()

    def __deepcopy__(self, memo: dict) -> "BeliefGraph":
        return self.clone()

    # --- Export ---

    @waits
    def to_json(self) -> dict[str, Any]:
        return {
            "nodes": [
                {"id": i, "label": n.label, "added_at": list(n.added_at)}
                for i, n in enumerate(self.nodes)
            ],
            "edges": [
                {
                    "src": e.src,
                    "dst": e.dst,
                    "label": e.label,
                    "added_at": list(e.added_at),
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "BeliefGraph":
        nodes = sorted(data.get("nodes", []), key=lambda n: n["id"])
        if [n["id"] for n in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be contiguous from 0")
        graph = cls(
            (Node(n["label"], Timestamp(*n["added_at"])) for n in nodes),
            (
                Edge(e["src"], e["dst"], e["label"], Timestamp(*e["added_at"]))
                for e in data.get("edges", [])
            ),
        )
        for edge in graph.edges:
            graph._check_index(edge.src)
            graph._check_index(edge.dst)
        return graph

    @waits
    def to_dot(self, name: str = "belief") -> str:
        lines = [f"digraph {json.dumps(name)} {{"]
        for i, node in enumerate(self.nodes):
            label = json.dumps(f"{node.label}\n{node.added_at}")
            lines.append(f"  n{i} [label={label}];")
        for edge in self.edges:
            label = json.dumps(edge.label)
            lines.append(f"  n{edge.src} -> n{edge.dst} [label={label}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def replay(
    events: Iterable[GraphEvent],
    graph: BeliefGraph | None = None,
    mode: ApplyMode = "strict",
) -> BeliefGraph:
    """Applies events to a copy of `graph` (or an empty graph)."""
    result = graph.clone() if graph is not None else BeliefGraph()
    return result.apply_events(events, mode)
