# Filename: tests/conftest.py
"""
Shared fixtures: a small random kitchen world that writes consistent game
episodes, a preprocessed cache built from it and a tiny model.
"""

import random

import pytest
import torch

from eventgraph.config import EncodingConfig, RunConfig, TrainConfig
from eventgraph.data import RawExample, preprocess, write_dataset
from eventgraph.data.vocab import label_vocabulary, word_vocabulary
from eventgraph.graph import RdfTriple, UpdateCommand, apply_commands
from eventgraph.model import EventGraphModel

ROOMS = ("kitchen", "pantry", "garden")
FURNITURE = ("table", "counter", "fridge")
FOODS = ("apple", "carrot", "potato")
COLORED_FOODS = ("purple potato", "yellow potato", "red apple", "carrot")
STATES = ("sliced", "chopped", "closed")


def candidate_triples(foods: tuple[str, ...]) -> list[RdfTriple]:
    triples = []
    for room in ROOMS:
        triples.append(RdfTriple("player", room, "at"))
        triples.append(RdfTriple("exit", room, "east_of"))
        for furniture in FURNITURE:
            triples.append(RdfTriple(furniture, room, "in"))
    for food in foods:
        triples.append(RdfTriple(food, "player", "in"))
        for furniture in FURNITURE:
            triples.append(RdfTriple(food, furniture, "on"))
        for state in STATES:
            triples.append(RdfTriple(food, state, "is"))
    return triples


def step_commands(
    rng: random.Random, triples: set[RdfTriple], foods: tuple[str, ...]
) -> list[UpdateCommand]:
    """
    One to three commands that each change the graph. No two commands touch
    the same (subject, object) pair, and adds never reuse a pair in use.
    """
    used = {(t.subject, t.object) for t in triples}
    touched: set[tuple[str, str]] = set()
    commands = []
    for _ in range(rng.randint(1, 3)):
        present = sorted(t for t in triples if (t.subject, t.object) not in touched)
        if present and rng.random() < 0.3:
            triple = rng.choice(present)
            commands.append(UpdateCommand.delete(*_fields(triple)))
        else:
            options = [
                t
                for t in candidate_triples(foods)
                if (t.subject, t.object) not in used | touched
            ]
            triple = rng.choice(options)
            commands.append(UpdateCommand.add(*_fields(triple)))
        touched.add((triple.subject, triple.object))
    return commands


def _fields(triple: RdfTriple) -> tuple[str, str, str]:
    return triple.subject, triple.object, triple.relation


def _example(
    game_id: str,
    walkthrough_step: int,
    random_step: int,
    triples: set[RdfTriple],
    commands: list[UpdateCommand],
) -> RawExample:
    seen = " . ".join(f"{c.n1} {c.r} {c.n2}" for c in commands if c.op == "add")
    gone = " . ".join(f"no {c.n1} {c.r} {c.n2}" for c in commands if c.op == "delete")
    return RawExample(
        game_id=game_id,
        walkthrough_step=walkthrough_step,
        random_step=random_step,
        observation=f"{game_id} step {walkthrough_step} {random_step} : {seen} {gone}",
        previous_action="look" if walkthrough_step == 0 else "go east",
        previous_graph=frozenset(triples),
        target_commands=tuple(commands),
    )


def toy_game(
    game_id: str,
    seed: int,
    walkthrough: int = 3,
    randoms: int = 2,
    colored: bool = False,
) -> list[RawExample]:
    """
    Walkthrough steps 0..walkthrough-1, each followed by up to `randoms`
    random steps branching off it.
    """
    rng = random.Random(seed)
    foods = COLORED_FOODS if colored else FOODS
    examples = []
    triples: set[RdfTriple] = set()
    for w in range(walkthrough):
        commands = step_commands(rng, triples, foods)
        examples.append(_example(game_id, w, 0, triples, commands))
        triples = apply_commands(triples, commands)
        branch = set(triples)
        for r in range(1, rng.randint(0, randoms) + 1):
            commands = step_commands(rng, branch, foods)
            examples.append(_example(game_id, w, r, branch, commands))
            branch = apply_commands(branch, commands)
    return examples


def write_splits(directory, colored: bool = False):
    directory.mkdir(parents=True, exist_ok=True)
    games = {"train": range(0, 4), "valid": range(4, 5), "test": range(5, 7)}
    for split, numbers in games.items():
        examples = [
            e for n in numbers for e in toy_game(f"g{n}", seed=n, colored=colored)
        ]
        write_dataset(directory / f"{split}.jsonl", examples)
    return directory


# --- Fixtures ---


@pytest.fixture
def make_game():
    return toy_game


@pytest.fixture
def raw_dir(tmp_path):
    return write_splits(tmp_path / "raw")


@pytest.fixture
def cache_dir(raw_dir, tmp_path):
    output = tmp_path / "cache"
    preprocess(raw_dir, output)
    return output


@pytest.fixture
def multi_cache_dir(tmp_path):
    raw = write_splits(tmp_path / "raw_multi", colored=True)
    output = tmp_path / "cache_multi"
    preprocess(raw, output, multi_mode=True)
    return output


@pytest.fixture
def encoding():
    return EncodingConfig(
        hidden_dim=8,
        temporal_dim=4,
        type_dim=4,
        auto_dim=8,
        key_dim=4,
        word_dim=6,
        conv_layers=1,
        conv_kernel=3,
    )


@pytest.fixture
def run_config(encoding):
    return RunConfig(
        encoding,
        TrainConfig(
            batch_size=4,
            max_steps=2,
            eval_interval=1,
            log_interval=1,
            eval_limit=2,
            max_events=6,
        ),
    )


@pytest.fixture
def words():
    tokens = [*ROOMS, *FURNITURE, *FOODS, *STATES, "player", "exit", "east_of"]
    return word_vocabulary([tokens, ["at", "in", "on", "is", "you", "see", "."]])


@pytest.fixture
def labels():
    return label_vocabulary(
        [*ROOMS, *FURNITURE, *FOODS, *STATES, "player", "exit"]
        + ["at", "in", "on", "is", "east_of"]
    )


@pytest.fixture
def model(encoding, words, labels):
    torch.manual_seed(0)
    return EventGraphModel(encoding, words, labels).eval()
