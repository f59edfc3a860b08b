# Filename: src/eventgraph/util/atomic.py
"""Utility for writing files atomically via a temporary sibling."""

import contextlib
import logging
import os
import tempfile
from collections.abc import Iterator
from pathlib import Path

log = logging.getLogger(__name__)


@contextlib.contextmanager
def atomic_path(path: str | Path) -> Iterator[Path]:
    """
    Context manager yielding a temporary path next to `path`.

    The temporary file replaces `path` when the block exits cleanly and is
    removed if it raises, so readers never see a half-written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    temp_path = Path(temp_name)
    try:
        yield temp_path
        os.replace(temp_path, path)
        log.debug(f"Wrote {path}")
    finally:
        temp_path.unlink(missing_ok=True)


@contextlib.contextmanager
def atomic_open(path: str | Path, mode: str = "w", **kwargs):
    """Like open(), but the file only appears at `path` once fully written."""
    with atomic_path(path) as temp_path:
        with open(temp_path, mode, **kwargs) as writer:
            yield writer
