# Filename: src/eventgraph/graph/colors.py
"""
Colored food handling for multi-object mode.

A colored item such as "purple potato" lives in the graph as a plain "potato"
node with an "is" edge to a "purple" node. These helpers recover the entity
key of such nodes and merge them back into label-level triples.
"""

import logging
from collections.abc import Collection

from ._graph import BeliefGraph, RdfTriple

log = logging.getLogger(__name__)

DEFAULT_COLORS = ("red", "yellow", "green", "purple", "white", "orange")
COLOR_RELATION = "is"


def split_label(label: str, colors: Collection[str]) -> tuple[str, str] | None:
    """Returns (color, item) for "<color> <item>" labels, otherwise None."""
    color, _, item = label.partition(" ")
    if color in colors and item:
        return color, item
    return None


def color_map(graph: BeliefGraph, colors: Collection[str]) -> dict[int, int]:
    """
    Maps each colored node to the color node it is attached to.
    A node with several colors keeps the earliest-added attachment.
    """
    chosen: dict[int, tuple] = {}
    for edge in graph.edges:
        if edge.label != COLOR_RELATION or edge.src == edge.dst:
            continue
        if graph.nodes[edge.dst].label not in colors:
            continue
        rank = (edge.added_at, graph.nodes[edge.dst].added_at, edge.dst)
        if edge.src not in chosen or rank < chosen[edge.src]:
            chosen[edge.src] = rank
    return {src: rank[-1] for src, rank in chosen.items()}


def entity_keys(graph: BeliefGraph, colors: Collection[str]) -> list[str | None]:
    """
    Label-level identity of every node. Colored nodes get "<color> <label>",
    color nodes hanging off them get None.
    """
    keys: list[str | None] = [node.label for node in graph.nodes]
    for item, color in color_map(graph, colors).items():
        keys[item] = f"{graph.nodes[color].label} {graph.nodes[item].label}"
    for edge in graph.edges:
        if edge.label == COLOR_RELATION and graph.nodes[edge.dst].label in colors:
            if edge.src != edge.dst:
                keys[edge.dst] = None
    return keys


def merge_colored_nodes(
    graph: BeliefGraph, colors: Collection[str] = DEFAULT_COLORS
) -> set[RdfTriple]:
    """
    Extracts triples after folding color nodes into their items' labels.
    Graphs without color edges give the same result as extract_triples.
    """
    keys = entity_keys(graph, colors)
    triples = set()
    for edge in graph.edges:
        subject, object_ = keys[edge.src], keys[edge.dst]
        if object_ is None and edge.label == COLOR_RELATION:
            continue
        if subject is None or object_ is None:
            # color node used in some other relation; keep its plain label
            subject = subject or graph.nodes[edge.src].label
            object_ = object_ or graph.nodes[edge.dst].label
        triples.add(RdfTriple(subject, object_, edge.label))
    log.trace(f"Merged {len(graph.edges)} edges into {len(triples)} triples")
    return triples
