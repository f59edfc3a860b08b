# Filename: src/eventgraph/data/preprocess.py
"""
Replays each game's commands as graph events and cuts the result into
datapoints and trajectories.

Every game is replayed from an empty graph, so the events that rebuild a
datapoint's prior graph keep the timestamps they were generated at.
"""

import json
import logging
from collections import defaultdict
from collections.abc import Collection, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..graph import (
    DEFAULT_COLORS,
    EXIT_LABELS,
    BeliefGraph,
    GraphEvent,
    RdfTriple,
    UpdateCommand,
    apply_commands,
    commands_to_events,
    merge_colored_nodes,
    replay,
    state_labels,
)
from ..util.atomic import atomic_open
from ..util.resources import cpu_count
from .dataset import RawExample, load_dataset, sort_commands
from .parse import parse_command
from .tokenize import tokenize
from .vocab import Vocabulary, label_vocabulary, word_vocabulary

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SPLITS = ("train", "valid", "test")
SORT_ORDER = "delete before add, then lexicographic (n1, n2, r)"


class ReplayDesyncError(RuntimeError):
    """Replayed graph disagrees with a step's recorded previous graph."""

    def __init__(
        self,
        key: tuple[str, int, int],
        missing: Collection[RdfTriple],
        extra: Collection[RdfTriple],
    ):
        super().__init__(
            f"replay desync at {key}: "
            f"missing {sorted(map(str, missing))}, extra {sorted(map(str, extra))}"
        )
        self.key = key
        self.missing = frozenset(missing)
        self.extra = frozenset(extra)


@dataclass(frozen=True)
class Datapoint:
    game_id: str
    walkthrough_step: int
    random_step: int
    obs_tokens: tuple[str, ...]
    action_tokens: tuple[str, ...]
    prior_events: tuple[GraphEvent, ...]
    target_events: tuple[GraphEvent, ...]
    target_commands: tuple[UpdateCommand, ...] = ()
    previous_graph: frozenset[RdfTriple] = field(default_factory=frozenset)

    @property
    def id(self) -> str:
        return f"{self.game_id}/{self.walkthrough_step}/{self.random_step}"

    @property
    def t_g(self) -> int:
        return self.walkthrough_step + self.random_step

    def prior_graph(self) -> BeliefGraph:
        return replay(self.prior_events)

    def to_dict(self) -> dict[str, Any]:
        return {
            "game_id": self.game_id,
            "walkthrough_step": self.walkthrough_step,
            "random_step": self.random_step,
            "obs_tokens": list(self.obs_tokens),
            "action_tokens": list(self.action_tokens),
            "prior_events": [e.to_dict() for e in self.prior_events],
            "target_events": [e.to_dict() for e in self.target_events],
            "target_commands": [str(c) for c in self.target_commands],
            "previous_graph": [
                [t.subject, t.object, t.relation] for t in sorted(self.previous_graph)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Datapoint":
        return cls(
            game_id=data["game_id"],
            walkthrough_step=data["walkthrough_step"],
            random_step=data["random_step"],
            obs_tokens=tuple(data["obs_tokens"]),
            action_tokens=tuple(data["action_tokens"]),
            prior_events=tuple(map(GraphEvent.from_dict, data["prior_events"])),
            target_events=tuple(map(GraphEvent.from_dict, data["target_events"])),
            target_commands=tuple(map(parse_command, data["target_commands"])),
            previous_graph=frozenset(RdfTriple(*t) for t in data["previous_graph"]),
        )


@dataclass(frozen=True)
class Trajectory:
    """Walkthrough steps 0..k followed by the random steps taken from step k."""

    game_id: str
    walkthrough_step: int
    datapoints: tuple[Datapoint, ...]
    final_triples: frozenset[RdfTriple]

    def to_dict(self) -> dict[str, Any]:
        return {
            "game_id": self.game_id,
            "walkthrough_step": self.walkthrough_step,
            "datapoints": [d.id for d in self.datapoints],
            "final_triples": [
                [t.subject, t.object, t.relation] for t in sorted(self.final_triples)
            ],
        }


def colored_item_split(
    items: Iterable[UpdateCommand | RdfTriple],
    graph: BeliefGraph,
    t_g: int,
    colors: Collection[str] = DEFAULT_COLORS,
    t_e_start: int = 0,
    fresh_labels: Collection[str] = EXIT_LABELS,
) -> list[GraphEvent]:
    """
    Events for commands or triples with every "<color> <item>" label split
    into an item node joined to a color node by an "is" edge. Triples are
    read as add commands. Labels without a color prefix are untouched.
    """
    commands = [
        UpdateCommand.add(item.subject, item.object, item.relation)
        if isinstance(item, RdfTriple)
        else item
        for item in items
    ]
    return commands_to_events(
        sort_commands(commands),
        graph,
        t_g,
        t_e_start=t_e_start,
        fresh_labels=fresh_labels,
        colors=colors,
    )


# --- Trajectory replay ---


@dataclass
class _GameReplay:
    """Replays one game's walkthrough and random chains."""

    multi_mode: bool
    strict: bool
    fresh_labels: frozenset[str]
    colors: tuple[str, ...]
    tokenizer: str

    def triples(self, graph: BeliefGraph) -> set[RdfTriple]:
        if self.multi_mode:
            return merge_colored_nodes(graph, self.colors)
        return graph.extract_triples()

    def events(
        self, commands: Iterable[UpdateCommand], graph: BeliefGraph, t_g: int
    ) -> list[GraphEvent]:
        return commands_to_events(
            sort_commands(commands),
            graph,
            t_g,
            t_e_start=1,
            mode="strict" if self.strict else "lenient",
            fresh_labels=self.fresh_labels,
            colors=self.colors if self.multi_mode else None,
        )

    def sync(
        self, example: RawExample, graph: BeliefGraph, history: list[GraphEvent]
    ) -> tuple[BeliefGraph, list[GraphEvent]]:
        """Checks the replayed graph against the recorded one."""
        actual = self.triples(graph)
        expected = set(example.previous_graph)
        if actual == expected:
            return graph, history
        error = ReplayDesyncError(example.key, expected - actual, actual - expected)
        if self.strict:
            raise error
        log.warning(f"{error}; rebuilding from the recorded graph")
        commands = [
            UpdateCommand.add(t.subject, t.object, t.relation) for t in expected
        ]
        history = self.events(commands, BeliefGraph(), max(example.t_g - 1, 0))
        return replay(history), history

    def step(
        self, example: RawExample, graph: BeliefGraph, history: list[GraphEvent]
    ) -> tuple[Datapoint, BeliefGraph, list[GraphEvent]]:
        graph, history = self.sync(example, graph, history)
        t_g = example.t_g
        events = self.events(example.target_commands, graph, t_g)
        targets = [
            GraphEvent.start(t_g, 0),
            *events,
            GraphEvent.end(t_g, len(events) + 1),
        ]
        datapoint = Datapoint(
            game_id=example.game_id,
            walkthrough_step=example.walkthrough_step,
            random_step=example.random_step,
            obs_tokens=tuple(tokenize(example.observation, self.tokenizer)),
            action_tokens=tuple(tokenize(example.previous_action, self.tokenizer)),
            prior_events=tuple(history),
            target_events=tuple(targets),
            target_commands=tuple(sort_commands(example.target_commands)),
            previous_graph=example.previous_graph,
        )
        log.trace(f"{datapoint.id}: {len(history)} prior, {len(events)} target events")
        return datapoint, replay(events, graph), history + events

    def game(self, examples: list[RawExample]) -> list[Trajectory]:
        by_step = {(e.walkthrough_step, e.random_step): e for e in examples}
        game_id = examples[0].game_id
        walkthrough = sorted(w for w, r in by_step if r == 0)
        if walkthrough != list(range(len(walkthrough))):
            raise ValueError(f"{game_id}: walkthrough steps {walkthrough} have gaps")

        trajectories = []
        graph, history = BeliefGraph(), []
        walked: list[Datapoint] = []
        for w in walkthrough:
            datapoint, graph, history = self.step(by_step[w, 0], graph, history)
            walked.append(datapoint)

            branch_graph, branch_history = graph, history
            branch: list[Datapoint] = []
            randoms = sorted(r for v, r in by_step if v == w and r > 0)
            if randoms != list(range(1, len(randoms) + 1)):
                raise ValueError(f"{game_id}: random steps {randoms} at {w} have gaps")
            for r in randoms:
                dp, branch_graph, branch_history = self.step(
                    by_step[w, r], branch_graph, branch_history
                )
                branch.append(dp)

            last = (walked + branch)[-1]
            final = by_step[w, len(randoms)]
            trajectories.append(
                Trajectory(
                    game_id=game_id,
                    walkthrough_step=w,
                    datapoints=tuple(walked + branch),
                    final_triples=frozenset(
                        apply_commands(final.previous_graph, final.target_commands)
                    ),
                )
            )
            log.trace(f"{game_id}: trajectory {w} ends at {last.id}")
        return trajectories


def build_datapoints(
    examples: list[RawExample],
    multi_mode: bool = False,
    *,
    strict: bool = True,
    colors: Collection[str] = DEFAULT_COLORS,
    fresh_labels: Collection[str] | None = None,
    tokenizer: str = "rule",
    workers: int = 1,
) -> list[Trajectory]:
    """
    Groups examples by game and replays each game from an empty graph.

    Trajectory k holds walkthrough steps 0..k then the random steps taken
    from step k. Exit labels and every "is" object in the examples get a
    fresh node per attachment unless `fresh_labels` is given.
    `workers=0` uses one process per core.

    Raises:
        ReplayDesyncError: in strict mode, when a replayed graph disagrees
            with the recorded previous graph
    """
    if fresh_labels is None:
        triples = {t for e in examples for t in e.previous_graph}
        triples.update(c.triple for e in examples for c in e.target_commands)
        fresh_labels = EXIT_LABELS | state_labels(triples)
        log.info(f"Fresh-node labels: {sorted(fresh_labels)}")

    games: dict[str, list[RawExample]] = defaultdict(list)
    for example in examples:
        games[example.game_id].append(example)

    replayer = _GameReplay(
        multi_mode=multi_mode,
        strict=strict,
        fresh_labels=frozenset(fresh_labels),
        colors=tuple(colors),
        tokenizer=tokenizer,
    )
    ordered = [games[game_id] for game_id in sorted(games)]
    workers = workers or cpu_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(replayer.game, ordered))
    else:
        results = list(map(replayer.game, ordered))

    trajectories = [t for game in results for t in game]
    log.info(f"Built {len(trajectories)} trajectories from {len(games)} games")
    return trajectories


def unique_datapoints(trajectories: Iterable[Trajectory]) -> list[Datapoint]:
    """Every datapoint once, in first-seen order."""
    seen: dict[str, Datapoint] = {}
    for trajectory in trajectories:
        for datapoint in trajectory.datapoints:
            seen.setdefault(datapoint.id, datapoint)
    return list(seen.values())


# --- Cache ---


@dataclass
class Manifest:
    multi_mode: bool
    seed: int
    strict: bool
    tokenizer: str
    colors: tuple[str, ...]
    fresh_labels: tuple[str, ...]
    words: Vocabulary
    labels: Vocabulary
    splits: dict[str, dict[str, int]] = field(default_factory=dict)
    sort_order: str = SORT_ORDER
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "multi_mode": self.multi_mode,
            "seed": self.seed,
            "strict": self.strict,
            "tokenizer": self.tokenizer,
            "sort_order": self.sort_order,
            "colors": list(self.colors),
            "fresh_labels": list(self.fresh_labels),
            "splits": self.splits,
            "words": self.words.to_list(),
            "labels": self.labels.to_list(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Manifest":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(
                f"cache schema {data.get('schema_version')}, expected {SCHEMA_VERSION}"
            )
        return cls(
            multi_mode=data["multi_mode"],
            seed=data["seed"],
            strict=data["strict"],
            tokenizer=data["tokenizer"],
            colors=tuple(data["colors"]),
            fresh_labels=tuple(data["fresh_labels"]),
            words=Vocabulary.from_list(data["words"], 2),
            labels=Vocabulary.from_list(data["labels"], 1),
            splits=data["splits"],
            sort_order=data["sort_order"],
        )


def build_vocabularies(
    datapoints: Iterable[Datapoint], tokenizer: str = "rule"
) -> tuple[Vocabulary, Vocabulary]:
    """Word vocabulary over text and label tokens, label vocabulary over events."""
    datapoints = list(datapoints)
    labels = {
        e.label
        for d in datapoints
        for e in (*d.prior_events, *d.target_events)
        if e.label is not None
    }
    words = word_vocabulary(
        [
            *(d.obs_tokens for d in datapoints),
            *(d.action_tokens for d in datapoints),
            *(tokenize(label, tokenizer) for label in labels),
        ]
    )
    return words, label_vocabulary(labels)


def find_split(directory: Path, split: str) -> Path | None:
    for suffix in (".jsonl", ".json"):
        path = directory / f"{split}{suffix}"
        if path.exists():
            return path
    return None


def save_split(output: Path, split: str, trajectories: list[Trajectory]):
    with atomic_open(output / f"{split}.datapoints.jsonl", encoding="utf-8") as writer:
        for datapoint in unique_datapoints(trajectories):
            writer.write(json.dumps(datapoint.to_dict()) + "\n")
    path = output / f"{split}.trajectories.jsonl"
    with atomic_open(path, encoding="utf-8") as writer:
        for trajectory in trajectories:
            writer.write(json.dumps(trajectory.to_dict()) + "\n")


def load_split(directory: str | Path, split: str) -> list[Trajectory]:
    """Reads a cached split back into trajectories sharing datapoint objects."""
    directory = Path(directory)
    datapoints: dict[str, Datapoint] = {}
    with open(directory / f"{split}.datapoints.jsonl", encoding="utf-8") as reader:
        for line in reader:
            datapoint = Datapoint.from_dict(json.loads(line))
            datapoints[datapoint.id] = datapoint
    trajectories = []
    with open(directory / f"{split}.trajectories.jsonl", encoding="utf-8") as reader:
        for line in reader:
            data = json.loads(line)
            trajectories.append(
                Trajectory(
                    game_id=data["game_id"],
                    walkthrough_step=data["walkthrough_step"],
                    datapoints=tuple(datapoints[i] for i in data["datapoints"]),
                    final_triples=frozenset(
                        RdfTriple(*t) for t in data["final_triples"]
                    ),
                )
            )
    log.info(
        f"Loaded {split}: {len(datapoints)} datapoints, "
        f"{len(trajectories)} trajectories"
    )
    return trajectories


def load_manifest(directory: str | Path) -> Manifest:
    with open(Path(directory) / "manifest.json", encoding="utf-8") as reader:
        return Manifest.from_dict(json.load(reader))


def preprocess(
    input_dir: str | Path,
    output_dir: str | Path,
    *,
    multi_mode: bool = False,
    seed: int = 42,
    strict: bool = True,
    colors: Collection[str] = DEFAULT_COLORS,
    tokenizer: str = "rule",
    workers: int = 1,
) -> Manifest:
    """
    Builds the cache for every split found in `input_dir`. Vocabularies come
    from the training split. Source files are only read.
    """
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    paths = {split: find_split(input_dir, split) for split in SPLITS}
    paths = {split: path for split, path in paths.items() if path is not None}
    if "train" not in paths:
        raise FileNotFoundError(f"no train.jsonl or train.json in {input_dir}")

    raw = {split: load_dataset(path) for split, path in paths.items()}
    every = [e for examples in raw.values() for e in examples]
    triples = {t for e in every for t in e.previous_graph}
    triples.update(c.triple for e in every for c in e.target_commands)
    fresh_labels = EXIT_LABELS | state_labels(triples)
    log.info(f"Fresh-node labels: {sorted(fresh_labels)}")

    built = {
        split: build_datapoints(
            examples,
            multi_mode,
            strict=strict,
            colors=colors,
            fresh_labels=fresh_labels,
            tokenizer=tokenizer,
            workers=workers,
        )
        for split, examples in raw.items()
    }
    words, labels = build_vocabularies(
        unique_datapoints(built["train"]), tokenizer
    )

    manifest = Manifest(
        multi_mode=multi_mode,
        seed=seed,
        strict=strict,
        tokenizer=tokenizer,
        colors=tuple(colors),
        fresh_labels=tuple(sorted(fresh_labels)),
        words=words,
        labels=labels,
    )
    for split, trajectories in built.items():
        save_split(output_dir, split, trajectories)
        manifest.splits[split] = {
            "examples": len(raw[split]),
            "datapoints": len(unique_datapoints(trajectories)),
            "trajectories": len(trajectories),
        }
    with atomic_open(output_dir / "manifest.json", encoding="utf-8") as writer:
        json.dump(manifest.to_dict(), writer, indent=2)
    log.info(
        f"Preprocessed {sorted(built)} into {output_dir}: "
        f"{len(words)} words, {len(labels)} labels"
    )
    return manifest
