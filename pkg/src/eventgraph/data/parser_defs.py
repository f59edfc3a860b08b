# Filename: src/eventgraph/data/parser_defs.py
"""
Defines the pyparsing grammar for update command strings.
- `add ( n1 , n2 , r )` and `delete ( n1 , n2 , r )`
- the comma-delimited variant `add , n1 , n2 , r`
- several commands joined by `<sep>`
Labels may contain spaces; runs of whitespace inside a label collapse to one.
"""

import logging

import pyparsing as pp

log = logging.getLogger(__name__)

LPAREN, RPAREN, COMMA = map(pp.Suppress, "(),")
SEP = pp.Suppress(pp.Literal("<sep>"))

op = (pp.CaselessKeyword("add") | pp.CaselessKeyword("delete")).setResultsName("op")

label_word = pp.Word(pp.printables, excludeChars=",()<>")
label = pp.Combine(pp.OneOrMore(label_word), joinString=" ", adjacent=False)

arguments = (
    label.copy().setResultsName("n1")
    + COMMA
    + label.copy().setResultsName("n2")
    + COMMA
    + label.copy().setResultsName("r")
)

paren_form = op + LPAREN + arguments + RPAREN
comma_form = op + COMMA + arguments

command = pp.Group(paren_form | comma_form)

command_parser = command + pp.StringEnd()
command_list_parser = pp.Optional(pp.delimitedList(command, delim=SEP)) + pp.StringEnd()


def parse_line(line_str: str) -> pp.ParseResults:
    """
    Parse a single command string.

    Returns:
        ParseResults holding one group with `op`, `n1`, `n2` and `r`.

    Raises:
        ParseException: If the line doesn't match the expected format
    """
    return command_parser.parseString(line_str, parseAll=True)


def parse_list(line_str: str) -> pp.ParseResults:
    """Parse zero or more commands separated by `<sep>`."""
    return command_list_parser.parseString(line_str, parseAll=True)
