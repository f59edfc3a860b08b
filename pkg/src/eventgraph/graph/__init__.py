# Filename: src/eventgraph/graph/__init__.py
"""
eventgraph Graph Package.

Timestamped graph events, the belief graph they update, and conversions to
and from label-level update commands.
"""

from ._event import (
    MASK_TABLE,
    NUM_EVENT_KINDS,
    ArgumentMask,
    EventKind,
    GraphEvent,
    GraphEventError,
    Timestamp,
)
from ._graph import (
    BeliefGraph,
    DanglingIndexError,
    DuplicateEdgeError,
    Edge,
    MissingEdgeError,
    Node,
    RdfTriple,
    replay,
)
from .colors import DEFAULT_COLORS, merge_colored_nodes, split_label
from .commands import (
    EXIT_LABELS,
    UpdateCommand,
    apply_commands,
    commands_to_events,
    events_to_commands,
    state_labels,
)

__all__ = [
    "MASK_TABLE",
    "NUM_EVENT_KINDS",
    "ArgumentMask",
    "EventKind",
    "GraphEvent",
    "GraphEventError",
    "Timestamp",
    "BeliefGraph",
    "DanglingIndexError",
    "DuplicateEdgeError",
    "Edge",
    "MissingEdgeError",
    "Node",
    "RdfTriple",
    "replay",
    "DEFAULT_COLORS",
    "merge_colored_nodes",
    "split_label",
    "EXIT_LABELS",
    "UpdateCommand",
    "apply_commands",
    "commands_to_events",
    "events_to_commands",
    "state_labels",
]
