# Filename: src/eventgraph/data/parse.py
"""
Turns command strings into UpdateCommand objects.
"""

import logging

import pyparsing as pp

from ..graph import UpdateCommand
from .parser_defs import parse_line, parse_list

log = logging.getLogger(__name__)


class CommandParseError(ValueError):
    """A command string that does not match the grammar."""

    def __init__(self, text: str, line: int, column: int, reason: str):
        super().__init__(f"{reason} at {line}:{column} in {text!r}")
        self.text = text
        self.line = line
        self.column = column


def _build(group: pp.ParseResults) -> UpdateCommand:
    return UpdateCommand(group.op.lower(), group.n1, group.n2, group.r)


def parse_command(text: str) -> UpdateCommand:
    """Parses exactly one command, e.g. `add , apple , table , on`."""
    try:
        parsed = parse_line(text)
    except pp.ParseException as e:
        raise CommandParseError(text, e.lineno, e.col, e.msg) from e
    return _build(parsed[0])


def parse_commands(text: str) -> list[UpdateCommand]:
    """Parses a `<sep>`-joined command list; an empty string gives []."""
    try:
        parsed = parse_list(text)
    except pp.ParseException as e:
        raise CommandParseError(text, e.lineno, e.col, e.msg) from e
    commands = [_build(group) for group in parsed]
    log.trace(f"Parsed {len(commands)} commands from {text!r}")
    return commands
