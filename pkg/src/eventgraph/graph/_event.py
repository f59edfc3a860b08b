# Filename: src/eventgraph/graph/_event.py
"""
Timestamped graph events and the per-kind mask table.

The mask table is the single source of truth for which arguments an event
kind carries. It is read by event validation, by the decoder's event
embedding, by the training loss masks and by constrained decoding.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Any, NamedTuple


class EventKind(IntEnum):
    """Event type vocabulary. Ids are stored in checkpoints; do not reorder."""

    END = 0
    START = 1
    NODE_ADD = 2
    NODE_DELETE = 3
    EDGE_ADD = 4
    EDGE_DELETE = 5

    @property
    def text(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_text(cls, text: str) -> "EventKind":
        return cls[text.strip().upper().replace("-", "_")]


NUM_EVENT_KINDS = len(EventKind)


class ArgumentMask(NamedTuple):
    """Which arguments an event kind carries."""

    src: bool
    dst: bool
    label: bool

    @property
    def needs_nodes(self) -> bool:
        return self.src or self.dst


MASK_TABLE: dict[EventKind, ArgumentMask] = {
    EventKind.END: ArgumentMask(src=False, dst=False, label=False),
    EventKind.START: ArgumentMask(src=False, dst=False, label=False),
    EventKind.NODE_ADD: ArgumentMask(src=False, dst=False, label=True),
    EventKind.NODE_DELETE: ArgumentMask(src=True, dst=False, label=False),
    EventKind.EDGE_ADD: ArgumentMask(src=True, dst=True, label=True),
    EventKind.EDGE_DELETE: ArgumentMask(src=True, dst=True, label=False),
}


class GraphEventError(ValueError):
    """Raised when an event's arguments do not match its kind."""


class Timestamp(NamedTuple):
    """Two-dimensional timestamp: game step and event step within it."""

    t_g: int
    t_e: int

    def __str__(self) -> str:
        return f"[{self.t_g},{self.t_e}]"


@dataclass(frozen=True)
class GraphEvent:
    """One timestamped discrete update to a belief graph."""

    kind: EventKind
    ts: Timestamp
    src: int | None = None
    dst: int | None = None
    label: str | None = None

    def validate(self):
        """Raises GraphEventError if argument presence disagrees with MASK_TABLE."""
        mask = MASK_TABLE[self.kind]
        present = ArgumentMask(
            src=self.src is not None,
            dst=self.dst is not None,
            label=self.label is not None,
        )
        if present != mask:
            raise GraphEventError(
                f"{self.kind.text} expects {mask._asdict()}, got {present._asdict()}"
            )
        if self.ts.t_g < 0 or self.ts.t_e < 0:
            raise GraphEventError(f"negative timestamp {self.ts}")
        if mask.label and not self.label:
            raise GraphEventError(f"{self.kind.text} needs a non-empty label")

    @property
    def is_marker(self) -> bool:
        return self.kind in (EventKind.START, EventKind.END)

    # --- Constructors ---

    @classmethod
    def start(cls, t_g: int, t_e: int = 0) -> "GraphEvent":
        return cls(EventKind.START, Timestamp(t_g, t_e))

    @classmethod
    def end(cls, t_g: int, t_e: int) -> "GraphEvent":
        return cls(EventKind.END, Timestamp(t_g, t_e))

    @classmethod
    def node_add(cls, label: str, ts: Timestamp) -> "GraphEvent":
        return cls(EventKind.NODE_ADD, Timestamp(*ts), label=label)

    @classmethod
    def node_delete(cls, src: int, ts: Timestamp) -> "GraphEvent":
        return cls(EventKind.NODE_DELETE, Timestamp(*ts), src=src)

    @classmethod
    def edge_add(cls, src: int, dst: int, label: str, ts: Timestamp) -> "GraphEvent":
        return cls(EventKind.EDGE_ADD, Timestamp(*ts), src=src, dst=dst, label=label)

    @classmethod
    def edge_delete(cls, src: int, dst: int, ts: Timestamp) -> "GraphEvent":
        return cls(EventKind.EDGE_DELETE, Timestamp(*ts), src=src, dst=dst)

    # --- Serialization ---

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.text, "ts": list(self.ts)}
        if self.src is not None:
            data["src"] = self.src
        if self.dst is not None:
            data["dst"] = self.dst
        if self.label is not None:
            data["label"] = self.label
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GraphEvent":
        return cls(
            kind=EventKind.from_text(data["kind"]),
            ts=Timestamp(*data["ts"]),
            src=data.get("src"),
            dst=data.get("dst"),
            label=data.get("label"),
        )

    def __str__(self) -> str:
        args = [str(a) for a in (self.src, self.dst) if a is not None]
        if self.label is not None:
            args.append(repr(self.label))
        return f"{self.kind.text}({', '.join(args)})@{self.ts}"
