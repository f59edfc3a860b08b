#!/usr/bin/env python3
# Filename: src/eventgraph/cli.py
"""Command-line entry point for eventgraph."""

import argparse
import json
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.table import Table

from eventgraph.checkpoint import load_checkpoint
from eventgraph.config import load_config
from eventgraph.data import (
    FORMATS,
    dataset_stats,
    load_dataset,
    load_manifest,
    load_split,
    preprocess,
    tokenize,
    unique_datapoints,
)
from eventgraph.evaluation import GoldReplay, evaluate
from eventgraph.graph import BeliefGraph, events_to_commands
from eventgraph.log import setup_logging
from eventgraph.training import train
from eventgraph.util.atomic import atomic_open

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL", "TRACE"]


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--log",
        default="INFO",
        choices=LOG_LEVELS,
        help="Set the logging level (default: INFO)",
    )
    parser.add_argument(
        "--log-file",
        metavar="PATH",
        type=str,
        default=None,
        help="Write logs to the specified file as well as the console.",
    )


def _add_run_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="FILE", help="YAML run configuration")
    parser.add_argument(
        "--multi",
        action="store_true",
        default=None,
        help="Split colored items into item and color nodes",
    )
    parser.add_argument("--seed", type=int, default=None)


def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """Parses command-line arguments for eventgraph."""
    parser = argparse.ArgumentParser(
        prog="eventgraph",
        description="Builds knowledge graphs from text-game observations "
        "as sequences of timestamped graph events.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Examples:\n"
        "  eventgraph stats data/train.jsonl\n"
        "  eventgraph preprocess --input data --output cache\n"
        "  eventgraph train --data cache --out runs/base\n"
        "  eventgraph eval --checkpoint runs/base/best.pt --data cache "
        "--report report.json\n"
        "  eventgraph generate --checkpoint runs/base/last.pt "
        '--observation "an apple is on the table" --dot graph.dot',
    )
    commands = parser.add_subparsers(dest="command", required=True)

    stats = commands.add_parser("stats", help="Dataset statistics")
    stats.add_argument("dataset", metavar="FILE", help="Raw dataset file")
    stats.add_argument("--format", choices=sorted(FORMATS), default=None)
    stats.add_argument("--tokenizer", default="rule")

    prep = commands.add_parser("preprocess", help="Build the training cache")
    prep.add_argument("--input", required=True, metavar="DIR")
    prep.add_argument("--output", dest="out", required=True, metavar="DIR")
    prep.add_argument(
        "--strict", action=argparse.BooleanOptionalAction, default=None
    )
    prep.add_argument(
        "--workers", type=int, default=1, help="Processes; 0 for one per core"
    )
    _add_run_flags(prep)

    training = commands.add_parser("train", help="Train a model")
    training.add_argument("--data", required=True, metavar="DIR")
    training.add_argument("--out", required=True, metavar="DIR")
    training.add_argument(
        "--no-temp", action="store_true", help="Zero every temporal embedding"
    )
    training.add_argument("--max-steps", type=int, default=None)
    training.add_argument("--batch-size", type=int, default=None)
    training.add_argument("--device", default=None)
    _add_run_flags(training)

    scoring = commands.add_parser("eval", help="Score a checkpoint on a split")
    scoring.add_argument("--data", required=True, metavar="DIR")
    source = scoring.add_mutually_exclusive_group(required=True)
    source.add_argument("--checkpoint", metavar="FILE")
    source.add_argument(
        "--oracle", action="store_true", help="Score the gold events themselves"
    )
    scoring.add_argument("--split", default="test")
    scoring.add_argument("--metric", choices=["tf", "fr", "both"], default="both")
    scoring.add_argument("--multi", action="store_true", default=None)
    scoring.add_argument("--max-events", type=int, default=None)
    scoring.add_argument("--report", metavar="FILE", default=None)

    generate = commands.add_parser("generate", help="Decode one game step")
    generate.add_argument("--checkpoint", required=True, metavar="FILE")
    generate.add_argument("--observation", required=True)
    generate.add_argument("--action", default="")
    generate.add_argument("--graph", metavar="FILE", help="Starting graph JSON")
    generate.add_argument("--t-g", type=int, default=0, dest="t_g")
    generate.add_argument("--max-events", type=int, default=None)
    generate.add_argument("--dot", metavar="FILE")
    generate.add_argument("--json", metavar="FILE")

    export = commands.add_parser("export-dot", help="Convert graph JSON to DOT")
    export.add_argument("--graph", required=True, metavar="FILE")
    export.add_argument("--out", required=True, metavar="FILE")

    for sub in commands.choices.values():
        _add_common(sub)
    return parser.parse_args(argv)


# --- Sub-commands ---


def run_stats(args: argparse.Namespace, console: Console) -> int:
    examples = load_dataset(args.dataset, args.format)
    stats = dataset_stats(examples, args.tokenizer)
    table = Table(title=str(args.dataset))
    table.add_column("statistic")
    table.add_column("value", justify="right")
    for name, value in stats.items():
        text = f"{value:.2f}" if isinstance(value, float) else str(value)
        table.add_row(name, text)
    console.print(table)
    return 0


def run_preprocess(args: argparse.Namespace, console: Console) -> int:
    config = load_config(args.config).overlay(
        multi_mode=args.multi, seed=args.seed, strict=args.strict
    )
    manifest = preprocess(
        args.input,
        args.out,
        multi_mode=config.train.multi_mode,
        seed=config.train.seed,
        strict=config.train.strict,
        colors=config.train.colors,
        tokenizer=config.train.tokenizer,
        workers=args.workers,
    )
    console.print(json.dumps(manifest.splits, indent=2))
    return 0


def run_train(args: argparse.Namespace, console: Console) -> int:
    config = load_config(args.config).overlay(
        multi_mode=args.multi,
        seed=args.seed,
        max_steps=args.max_steps,
        batch_size=args.batch_size,
        device=args.device,
        temporal_mode="zero" if args.no_temp else None,
    )
    result = train(args.data, args.out, config)
    console.print(f"last checkpoint: {result.last}")
    if result.best is not None:
        console.print(f"best checkpoint: {result.best} ({result.best_score:.4f})")
    return 0


def run_eval(args: argparse.Namespace, console: Console) -> int:
    manifest = load_manifest(args.data)
    trajectories = load_split(args.data, args.split)
    multi_mode = args.multi if args.multi is not None else manifest.multi_mode
    if args.oracle:
        generator = GoldReplay(unique_datapoints(trajectories))
        max_events = 100 if args.max_events is None else args.max_events
    else:
        checkpoint = load_checkpoint(args.checkpoint)
        generator = checkpoint.model.eval()
        max_events = checkpoint.config.train.max_events
        if args.max_events is not None:
            max_events = args.max_events

    report = evaluate(
        generator,
        trajectories,
        args.metric,
        multi_mode,
        max_events,
        manifest.colors,
    )
    data = report.to_dict()
    for name in ("tf_f1", "tf_f1_micro", "fr_f1", "fr_f1_micro"):
        value = data[name]
        console.print(f"{name}: {'N/A' if value is None else f'{value:.4f}'}")
    if args.report:
        report.save(args.report)
    return 0


def run_generate(args: argparse.Namespace, console: Console) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    model = checkpoint.model.eval()
    graph = BeliefGraph()
    if args.graph:
        with open(args.graph, encoding="utf-8") as reader:
            graph = BeliefGraph.from_json(json.load(reader))

    tokenizer = model.embeddings.tokenizer
    max_events = (
        args.max_events
        if args.max_events is not None
        else checkpoint.config.train.max_events
    )
    state = model.generate(
        tokenize(args.observation, tokenizer),
        tokenize(args.action, tokenizer),
        graph,
        args.t_g,
        max_events,
    )
    events = state.generated
    console.print(f"{len(events)} events:")
    for event in events:
        console.print(f"  {event}", markup=False)
    commands = events_to_commands(events, graph, mode="lenient")
    console.print(f"{len(commands)} commands:")
    for command in sorted(commands):
        console.print(f"  {command}", markup=False)

    if args.dot:
        with atomic_open(args.dot, encoding="utf-8") as writer:
            writer.write(state.graph.to_dot())
    if args.json:
        with atomic_open(args.json, encoding="utf-8") as writer:
            json.dump(state.graph.to_json(), writer, indent=2)
    return 0


def run_export_dot(args: argparse.Namespace, console: Console) -> int:
    with open(args.graph, encoding="utf-8") as reader:
        graph = BeliefGraph.from_json(json.load(reader))
    with atomic_open(args.out, encoding="utf-8") as writer:
        writer.write(graph.to_dot(Path(args.graph).stem))
    console.print(f"{len(graph)} nodes, {len(graph.edges)} edges -> {args.out}")
    return 0


COMMANDS = {
    "stats": run_stats,
    "preprocess": run_preprocess,
    "train": run_train,
    "eval": run_eval,
    "generate": run_generate,
    "export-dot": run_export_dot,
}


# --- Main Application Logic ---


def main(argv: list[str] | None = None) -> int:
    """
    Main entry point: parses args, sets up logging and dispatches to the
    sub-command. Returns 0 on success, 1 on a data or model error and 2 on
    a usage error.
    """
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    setup_logging(args.log, args.log_file)
    log = logging.getLogger("eventgraph.cli")
    log.debug(f"Parsed arguments: {args}")

    try:
        return COMMANDS[args.command](args, Console())
    except Exception as e:
        log.critical(f"FATAL ERROR: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
