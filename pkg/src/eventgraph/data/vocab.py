# Filename: src/eventgraph/data/vocab.py
"""Token and label vocabularies, and pretrained word-vector loading."""

import logging
from collections.abc import Iterable
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

PAD = "<pad>"
UNK = "<unk>"


class Vocabulary:
    """
    Bidirectional token/id map. Reserved tokens come first, in the order
    given; the rest are sorted so the same data always gives the same ids.
    """

    def __init__(
        self, tokens: Iterable[str] = (), reserved: Iterable[str] = (PAD, UNK)
    ):
        reserved = list(reserved)
        self.itos: list[str] = reserved + sorted(set(tokens) - set(reserved))
        self.stoi: dict[str, int] = {t: i for i, t in enumerate(self.itos)}
        self.reserved = frozenset(range(len(reserved)))

    @property
    def unk_id(self) -> int:
        return self.stoi[UNK]

    @property
    def pad_id(self) -> int:
        return self.stoi.get(PAD, 0)

    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, token: str) -> bool:
        return token in self.stoi

    def __getitem__(self, token: str) -> int:
        return self.stoi.get(token, self.unk_id)

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self[t] for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.itos[i] for i in ids]

    def to_list(self) -> list[str]:
        return list(self.itos)

    @classmethod
    def from_list(cls, itos: list[str], reserved_count: int) -> "Vocabulary":
        vocab = cls(itos[reserved_count:], itos[:reserved_count])
        if vocab.itos != itos:
            raise ValueError("vocabulary list is not in canonical order")
        return vocab

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self.itos == other.itos

    __hash__ = None


def word_vocabulary(token_lists: Iterable[Iterable[str]]) -> Vocabulary:
    return Vocabulary((t for tokens in token_lists for t in tokens), (PAD, UNK))


def label_vocabulary(labels: Iterable[str]) -> Vocabulary:
    return Vocabulary(labels, (UNK,))


def load_vectors(path: str | Path, vocab: Vocabulary, dim: int) -> np.ndarray:
    """
    Reads a text vector file (word2vec/fastText style, optional header line)
    into a |vocab| x dim matrix. Tokens absent from the file stay zero.
    """
    matrix = np.zeros((len(vocab), dim), dtype=np.float32)
    found = 0
    with open(path, encoding="utf-8", errors="replace") as reader:
        for line_number, line in enumerate(reader, 1):
            parts = line.rstrip().split(" ")
            if line_number == 1 and len(parts) == 2:
                continue
            word = parts[0]
            if word not in vocab or vocab[word] in vocab.reserved:
                continue
            values = np.asarray(parts[1:], dtype=np.float32)
            if values.shape != (dim,):
                raise ValueError(
                    f"{path}:{line_number}: expected {dim} values, got {values.size}"
                )
            matrix[vocab[word]] = values
            found += 1
    log.info(f"Loaded {found}/{len(vocab)} word vectors from {path}")
    return matrix
