# Filename: src/eventgraph/model/embedding.py
"""
Word, label and temporal embeddings shared by the encoders and the decoder.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
import torch
from torch import nn

from ..config import EncodingConfig
from ..data.tokenize import tokenize
from ..data.vocab import Vocabulary
from ..graph import Timestamp

log = logging.getLogger(__name__)


def sinusoid(positions: torch.Tensor, dim: int) -> torch.Tensor:
    """
    Sinusoidal encodings of integer positions, shape positions.shape + (dim,).
    Even channels hold sines, odd channels cosines.
    """
    if dim % 2:
        raise ValueError(f"encoding width must be even, got {dim}")
    div_term = torch.exp(
        torch.arange(0, dim, 2, dtype=torch.float64) * (-math.log(10000.0) / dim)
    )
    angles = positions.to(torch.float64).unsqueeze(-1) * div_term.to(positions.device)
    encoding = torch.zeros(
        *positions.shape, dim, dtype=torch.float64, device=positions.device
    )
    encoding[..., 0::2] = torch.sin(angles)
    encoding[..., 1::2] = torch.cos(angles)
    return encoding.to(torch.get_default_dtype())


def positional_encoding(position: int, dim: int) -> torch.Tensor:
    if position < 0:
        raise ValueError(f"position must be non-negative, got {position}")
    return sinusoid(torch.tensor(position), dim)


class Embeddings(nn.Module):
    """
    The 300-d word table with its learned projection to the hidden size,
    label embeddings as the mean projected vector of a label's tokens, and
    two-part temporal encodings of (t_g, t_e).
    """

    def __init__(
        self,
        config: EncodingConfig,
        words: Vocabulary,
        vectors: np.ndarray | None = None,
        tokenizer: str = "rule",
        seed: int = 0,
    ):
        super().__init__()
        self.config = config
        self.vocab = words
        self.tokenizer = tokenizer
        self.words = nn.Embedding(
            len(words), config.word_dim, padding_idx=words.pad_id
        )
        with torch.no_grad():
            if vectors is None:
                generator = torch.Generator().manual_seed(seed)
                self.words.weight.normal_(generator=generator)
            else:
                if vectors.shape != (len(words), config.word_dim):
                    raise ValueError(
                        f"vector matrix {vectors.shape}, "
                        f"expected {(len(words), config.word_dim)}"
                    )
                self.words.weight.copy_(torch.from_numpy(vectors))
            self.words.weight[words.pad_id].zero_()
        self.words.weight.requires_grad_(not config.freeze_words)
        self.project = nn.Linear(config.word_dim, config.hidden_dim)
        self._label_tokens: dict[str, list[int]] = {}

    def text(self, ids: torch.Tensor) -> torch.Tensor:
        """Projected word embeddings, (..., L) ids to (..., L, H)."""
        return self.project(self.words(ids))

    def label_ids(self, label: str) -> list[int]:
        if label not in self._label_tokens:
            tokens = tokenize(label, self.tokenizer)
            self._label_tokens[label] = self.vocab.encode(tokens)
        return self._label_tokens[label]

    def labels(self, labels: Sequence[str | None]) -> torch.Tensor:
        """
        Mean projected token embedding per label, (n, H). None and empty
        labels give zero rows.
        """
        device = self.project.weight.device
        rows = [self.label_ids(label) if label else [] for label in labels]
        width = max([1, *map(len, rows)])
        ids = torch.full((len(rows), width), self.vocab.pad_id, dtype=torch.long)
        mask = torch.zeros((len(rows), width), dtype=torch.bool)
        for i, row in enumerate(rows):
            ids[i, : len(row)] = torch.tensor(row, dtype=torch.long)
            mask[i, : len(row)] = True
        ids, mask = ids.to(device), mask.to(device)

        projected = self.text(ids) * mask.unsqueeze(-1)
        counts = mask.sum(dim=1, keepdim=True).clamp(min=1)
        return projected.sum(dim=1) / counts

    def label(self, label: str) -> torch.Tensor:
        return self.labels([label])[0]

    def temporal(self, ts: torch.Tensor) -> torch.Tensor:
        """
        [Pos(t_g); Pos(t_e)] for a (..., 2) tensor of timestamps, each half
        temporal_dim / 2 wide. Zero in the no-temporal mode.
        """
        half = self.config.temporal_dim // 2
        if self.config.temporal_mode == "zero":
            return torch.zeros(
                *ts.shape[:-1],
                self.config.temporal_dim,
                device=ts.device,
                dtype=self.project.weight.dtype,
            )
        encoding = torch.cat(
            [sinusoid(ts[..., 0], half), sinusoid(ts[..., 1], half)], dim=-1
        )
        return encoding.to(self.project.weight.dtype)

    def timestamps(self, stamps: Sequence[Timestamp]) -> torch.Tensor:
        device = self.project.weight.device
        ts = torch.tensor([list(t) for t in stamps], dtype=torch.long, device=device)
        return self.temporal(ts.reshape(-1, 2))
