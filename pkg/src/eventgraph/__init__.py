# Filename: src/eventgraph/__init__.py
"""Dynamic knowledge graphs from text observations, one graph event at a time."""

# Registers the TRACE level on logging.Logger before any submodule logs
from . import log  # noqa: F401

__version__ = "0.1.0"
