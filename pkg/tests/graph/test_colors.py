# Filename: tests/graph/test_colors.py
"""Tests for colored item splitting and merging in multi-object mode."""

import random

from eventgraph.data import sort_commands
from eventgraph.graph import (
    DEFAULT_COLORS,
    BeliefGraph,
    GraphEvent,
    RdfTriple,
    Timestamp,
    UpdateCommand,
    commands_to_events,
    merge_colored_nodes,
    replay,
    split_label,
)
from eventgraph.graph.colors import entity_keys

POTATOES = [
    UpdateCommand.add("purple potato", "table", "on"),
    UpdateCommand.add("yellow potato", "chair", "on"),
]


def ts(t_e: int) -> Timestamp:
    return Timestamp(0, t_e)


def potatoes() -> BeliefGraph:
    return replay(commands_to_events(POTATOES, BeliefGraph(), 0, colors=DEFAULT_COLORS))


def test_two_potatoes_split():
    """Each colored potato becomes an item node with its own color node"""
    graph = BeliefGraph()

    events = commands_to_events(POTATOES, graph, 0, colors=DEFAULT_COLORS)

    assert events == [
        GraphEvent.node_add("potato", ts(0)),
        GraphEvent.node_add("purple", ts(1)),
        GraphEvent.edge_add(0, 1, "is", ts(2)),
        GraphEvent.node_add("table", ts(3)),
        GraphEvent.edge_add(0, 2, "on", ts(4)),
        GraphEvent.node_add("potato", ts(5)),
        GraphEvent.node_add("yellow", ts(6)),
        GraphEvent.edge_add(3, 4, "is", ts(7)),
        GraphEvent.node_add("chair", ts(8)),
        GraphEvent.edge_add(3, 5, "on", ts(9)),
    ]


def test_two_potatoes_merge():
    """Merging folds the colors back into the item labels"""
    graph = potatoes()

    triples = merge_colored_nodes(graph, DEFAULT_COLORS)

    assert triples == {
        RdfTriple("purple potato", "table", "on"),
        RdfTriple("yellow potato", "chair", "on"),
    }


def test_colored_delete_removes_color_node():
    """Deleting a colored item's last relation removes its color node too"""
    graph = potatoes()
    command = UpdateCommand.delete("purple potato", "table", "on")

    events = commands_to_events([command], graph, 1, colors=DEFAULT_COLORS)
    result = replay(events, graph)

    assert merge_colored_nodes(result) == {RdfTriple("yellow potato", "chair", "on")}
    assert [n.label for n in result.nodes] == ["potato", "yellow", "chair"]


def test_existing_colored_item_reused():
    """A second relation on the same colored item reuses its node"""
    graph = potatoes()
    command = UpdateCommand.add("yellow potato", "player", "in")

    events = commands_to_events([command], graph, 1, colors=DEFAULT_COLORS)

    assert events[-1] == GraphEvent.edge_add(3, 6, "in", Timestamp(1, 1))


def test_entity_keys():
    """Items get their colored key and color nodes get none"""
    graph = potatoes()

    keys = entity_keys(graph, DEFAULT_COLORS)

    assert keys == ["purple potato", None, "table", "yellow potato", None, "chair"]


def test_merge_without_colors_matches_extract():
    """Graphs without color edges merge to their plain triples"""
    command = UpdateCommand.add("apple", "table", "on")
    graph = replay(commands_to_events([command], BeliefGraph(), 0))

    triples = merge_colored_nodes(graph)

    assert triples == graph.extract_triples()


def test_split_label():
    """A known color prefix splits off the item"""
    parts = split_label("purple potato", DEFAULT_COLORS)

    assert parts == ("purple", "potato")


def test_split_label_plain():
    """Labels without a color prefix do not split"""
    parts = split_label("potato", DEFAULT_COLORS)

    assert parts is None


def test_split_label_bare_color():
    """A color on its own is not an item"""
    parts = split_label("purple", DEFAULT_COLORS)

    assert parts is None


ITEMS = ("potato", "apple", "pepper")
PLACES = ("table", "chair", "fridge", "player")
RELATIONS = ("on", "in", "at")


def random_triples(rng: random.Random) -> set[RdfTriple]:
    """Colored and plain triples with at most one relation per ordered pair."""
    colored = [f"{c} {i}" for c in DEFAULT_COLORS for i in ITEMS]
    labels = colored + list(PLACES)
    triples = {}
    for _ in range(rng.randint(0, 8)):
        subject, object_ = rng.sample(labels, 2)
        triples[subject, object_] = RdfTriple(subject, object_, rng.choice(RELATIONS))
    return set(triples.values())


def test_split_then_merge_round_trips():
    """Replaying split triples and merging the colors back gives the triples"""
    rng = random.Random(2024)

    for case in range(500):
        triples = random_triples(rng)
        adds = [UpdateCommand.add(t.subject, t.object, t.relation) for t in triples]

        events = commands_to_events(
            sort_commands(adds), BeliefGraph(), 0, colors=DEFAULT_COLORS
        )

        assert merge_colored_nodes(replay(events)) == triples, f"case {case}"
