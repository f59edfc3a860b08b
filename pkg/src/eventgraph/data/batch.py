# Filename: src/eventgraph/data/batch.py
"""
Batching of datapoints into padded tensors.

Target grids cover the whole event sequence, start marker included.
Position k of each head mask is set when event k carries that argument
(by MASK_TABLE) and k > 0, since the start marker is given, not predicted.
"""

import logging
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, fields

import torch

from ..graph import MASK_TABLE, GraphEvent
from .preprocess import Datapoint
from .vocab import Vocabulary

log = logging.getLogger(__name__)

NO_NODE = -1


@dataclass
class Batch:
    ids: list[str]
    obs: torch.Tensor
    obs_mask: torch.Tensor
    action: torch.Tensor
    action_mask: torch.Tensor
    prior_events: list[tuple[GraphEvent, ...]]
    target_events: list[tuple[GraphEvent, ...]]
    kinds: torch.Tensor
    src: torch.Tensor
    dst: torch.Tensor
    labels: torch.Tensor
    type_mask: torch.Tensor
    src_mask: torch.Tensor
    dst_mask: torch.Tensor
    label_mask: torch.Tensor

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def head_masks(self) -> tuple[torch.Tensor, ...]:
        return self.type_mask, self.src_mask, self.dst_mask, self.label_mask

    def to(self, device: torch.device | str) -> "Batch":
        values = {}
        for f in fields(self):
            value = getattr(self, f.name)
            values[f.name] = value.to(device) if torch.is_tensor(value) else value
        return Batch(**values)


def _pad(
    rows: Sequence[Sequence[int]], fill: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """Pads to the longest row, at least one column wide."""
    width = max([1, *map(len, rows)])
    grid = torch.full((len(rows), width), fill, dtype=torch.long)
    mask = torch.zeros((len(rows), width), dtype=torch.bool)
    for i, row in enumerate(rows):
        grid[i, : len(row)] = torch.tensor(row, dtype=torch.long)
        mask[i, : len(row)] = True
    return grid, mask


def collate(
    datapoints: Sequence[Datapoint], words: Vocabulary, labels: Vocabulary
) -> Batch:
    obs, obs_mask = _pad(
        [words.encode(d.obs_tokens) for d in datapoints], words.pad_id
    )
    action, action_mask = _pad(
        [words.encode(d.action_tokens) for d in datapoints], words.pad_id
    )

    width = max(len(d.target_events) for d in datapoints)
    shape = (len(datapoints), width)
    kinds = torch.zeros(shape, dtype=torch.long)
    src = torch.full(shape, NO_NODE, dtype=torch.long)
    dst = torch.full(shape, NO_NODE, dtype=torch.long)
    label_ids = torch.zeros(shape, dtype=torch.long)
    masks = {
        name: torch.zeros(shape, dtype=torch.bool)
        for name in ("type", "src", "dst", "label")
    }

    for i, datapoint in enumerate(datapoints):
        for k, event in enumerate(datapoint.target_events):
            kinds[i, k] = int(event.kind)
            if event.src is not None:
                src[i, k] = event.src
            if event.dst is not None:
                dst[i, k] = event.dst
            if event.label is not None:
                label_ids[i, k] = labels[event.label]
            if k == 0:
                continue
            argument = MASK_TABLE[event.kind]
            masks["type"][i, k] = True
            masks["src"][i, k] = argument.src
            masks["dst"][i, k] = argument.dst
            masks["label"][i, k] = argument.label

    return Batch(
        ids=[d.id for d in datapoints],
        obs=obs,
        obs_mask=obs_mask,
        action=action,
        action_mask=action_mask,
        prior_events=[d.prior_events for d in datapoints],
        target_events=[d.target_events for d in datapoints],
        kinds=kinds,
        src=src,
        dst=dst,
        labels=label_ids,
        type_mask=masks["type"],
        src_mask=masks["src"],
        dst_mask=masks["dst"],
        label_mask=masks["label"],
    )


def make_batches(
    datapoints: Sequence[Datapoint],
    batch_size: int,
    shuffle_seed: int | None,
    words: Vocabulary,
    labels: Vocabulary,
) -> Iterator[Batch]:
    """
    Yields batches of `batch_size` (the last one may be shorter). The order
    is shuffled by `shuffle_seed`, or kept as given when it is None.
    """
    order = list(range(len(datapoints)))
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(order)
    for start in range(0, len(order), batch_size):
        chunk = [datapoints[i] for i in order[start : start + batch_size]]
        log.trace(f"Batch at {start}: {len(chunk)} datapoints")
        yield collate(chunk, words, labels)
