# Filename: tests/data/test_parse.py
"""Tests for the update command grammar."""

import pytest

from eventgraph.data import CommandParseError, parse_command, parse_commands
from eventgraph.graph import UpdateCommand


def test_comma_form():
    """The dataset's comma-delimited form"""
    text = "add , apple , table , on"

    command = parse_command(text)

    assert command == UpdateCommand.add("apple", "table", "on")


def test_paren_form():
    """add ( n1 , n2 , r ) parses the same way"""
    text = "delete ( apple , table , on )"

    command = parse_command(text)

    assert command == UpdateCommand.delete("apple", "table", "on")


def test_multi_word_labels():
    """Labels may hold spaces; runs of whitespace collapse"""
    text = "add , purple   potato , chopping board , on"

    command = parse_command(text)

    assert command.n2 == "chopping board"
    assert command.n1 == "purple potato"


def test_op_case_insensitive():
    """ADD reads as add"""
    text = "ADD , apple , table , on"

    command = parse_command(text)

    assert command.op == "add"


def test_underscore_relation():
    """Relations such as north_of are single labels"""
    text = "add , kitchen , pantry , north_of"

    command = parse_command(text)

    assert command.r == "north_of"


def test_command_list():
    """<sep> joins several commands"""
    text = "delete , apple , table , on <sep> add , apple , fridge , in"

    commands = parse_commands(text)

    assert commands == [
        UpdateCommand.delete("apple", "table", "on"),
        UpdateCommand.add("apple", "fridge", "in"),
    ]


def test_empty_list():
    """An empty string holds no commands"""
    commands = parse_commands("")

    assert commands == []


def test_missing_argument():
    """Three fields are required"""
    with pytest.raises(CommandParseError):
        parse_command("add , apple , table")


def test_unknown_op():
    """Only add and delete are commands"""
    with pytest.raises(CommandParseError):
        parse_command("move , apple , table , on")


def test_error_position():
    """Parse errors carry the position and the offending text"""
    text = "add apple table on"

    with pytest.raises(CommandParseError) as error:
        parse_command(text)

    assert error.value.text == text
    assert error.value.column >= 1


def test_parse_error_is_value_error():
    """Callers can catch parse errors as ValueError"""
    with pytest.raises(ValueError):
        parse_commands("add , a , b , c <sep>")
