# Filename: src/eventgraph/util/resources.py
import logging
import os

import psutil

log = logging.getLogger(__name__)


def memory_mb(pid: int | None = None) -> float:
    """
    Resident set size of a process in MiB, the current one by default.
    """
    proc = psutil.Process(pid or os.getpid())
    return proc.memory_info().rss / 2**20


def cpu_count() -> int:
    """Physical cores if psutil can tell, logical ones otherwise."""
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
