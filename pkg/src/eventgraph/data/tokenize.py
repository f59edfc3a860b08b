# Filename: src/eventgraph/data/tokenize.py
"""
Tokenizers for observations, actions and labels.

The rule tokenizer is built in. The spaCy tokenizer is offered when the
package and an English pipeline are installed.
"""

import importlib.util
import logging
import re
from abc import ABC, abstractmethod
from functools import cache
from typing import Type

log = logging.getLogger(__name__)


class Tokenizer(ABC):
    """Abstract Base Class for tokenizers."""

    @staticmethod
    @abstractmethod
    def is_available() -> bool:
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def __call__(self, text: str) -> list[str]:
        """Lowercased tokens of `text`."""
        raise NotImplementedError  # pragma: no cover


class Rule(Tokenizer):
    """
    Regex tokenizer close to spaCy's English rules on game text: punctuation
    splits off, clitics ("n't", "'s") become their own tokens and underscore
    compounds such as north_of stay whole.
    """

    pattern = re.compile(
        r"[a-z0-9_]+?(?=n't\b)|n't\b|'[a-z]+\b|[a-z0-9_]+|[^\sa-z0-9_]"
    )

    @staticmethod
    def is_available() -> bool:
        return True

    def __call__(self, text: str) -> list[str]:
        return self.pattern.findall(text.lower())


class Spacy(Tokenizer):
    """spaCy's English tokenizer, without the rest of the pipeline."""

    model = "en_core_web_sm"

    def __init__(self):
        import spacy

        self.nlp = spacy.load(self.model, disable=["parser", "ner", "tagger"])

    @staticmethod
    def is_available() -> bool:
        return (
            importlib.util.find_spec("spacy") is not None
            and importlib.util.find_spec(Spacy.model) is not None
        )

    def __call__(self, text: str) -> list[str]:
        return [t.text.lower() for t in self.nlp(text) if not t.is_space]


TOKENIZERS: dict[str, Type[Tokenizer]] = {
    tokenizer.__name__.lower(): tokenizer
    for tokenizer in (Rule, Spacy)
    if tokenizer.is_available()
}


@cache
def get_tokenizer(name: str = "rule") -> Tokenizer:
    if name not in TOKENIZERS:
        raise KeyError(f"tokenizer {name!r} unavailable, have {sorted(TOKENIZERS)}")
    log.debug(f"Using {name} tokenizer")
    return TOKENIZERS[name]()


def tokenize(text: str, name: str = "rule") -> list[str]:
    return get_tokenizer(name)(text)
