# Filename: src/eventgraph/log.py
"""Logging setup for the eventgraph tools."""

import logging
import sys

from rich.console import Console
from rich.markup import escape

# --- Define TRACE level ---
TRACE_LEVEL_NUM = 5
logging.addLevelName(TRACE_LEVEL_NUM, "TRACE")


def trace(self, message, *args, **kws):
    # Yes, logger takes its '*args' as 'args'.
    if self.isEnabledFor(TRACE_LEVEL_NUM):
        self._log(TRACE_LEVEL_NUM, message, args, **kws)


logging.Logger.trace = trace
# --- End TRACE level definition ---

LEVEL_STYLES = (
    (logging.CRITICAL, "bold red"),
    (logging.ERROR, "red"),
    (logging.WARNING, "yellow"),
    (logging.INFO, "green"),
    (logging.DEBUG, "dim"),
    (TRACE_LEVEL_NUM, "dim white on grey11"),
)


class RichLogHandler(logging.Handler):
    """A logging handler that prints records to a rich Console with per-level markup."""

    def __init__(self, console: Console | None = None):
        super().__init__()
        self.console = console or Console(stderr=True)
        self.setFormatter(
            logging.Formatter("%(asctime)s %(name)s: %(message)s", datefmt="%H:%M:%S")
        )

    def markup(self, record: logging.LogRecord) -> str:
        plain_msg = escape(f"{record.name}: {record.getMessage()}")
        timestamp = self.formatter.formatTime(record, self.formatter.datefmt)
        for level, style in LEVEL_STYLES:
            if record.levelno >= level:
                markup = f"{timestamp} [{style}]{plain_msg}[/]"
                break
        else:
            markup = f"{timestamp} {plain_msg}"

        if record.exc_info:
            exc_text = escape(self.formatter.formatException(record.exc_info))
            markup += f"\n[red]{exc_text}[/red]"
        return markup

    def emit(self, record: logging.LogRecord):
        try:
            self.console.print(self.markup(record), highlight=False)
        except Exception:
            self.handleError(record)


def setup_logging(level_name: str = "INFO", log_file: str | None = None):
    """
    Configures the root logger to use the RichLogHandler and optionally a FileHandler.
    """
    level_name_upper = level_name.upper()
    if level_name_upper == "TRACE":
        log_level = TRACE_LEVEL_NUM
    else:
        log_level = getattr(logging, level_name_upper, logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Remove any existing handlers (e.g., from basicConfig in imports)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    log_formatter = logging.Formatter(
        "%(asctime)s %(levelname)-8s %(name)-25s %(message)s", datefmt="%H:%M:%S"
    )

    console_handler = RichLogHandler()
    console_handler.setLevel(log_level)
    root_logger.addHandler(console_handler)

    if log_file:
        try:
            file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
            file_handler.setLevel(log_level)
            file_handler.setFormatter(log_formatter)
            root_logger.addHandler(file_handler)
            logging.getLogger("eventgraph").info(f"Logging to file: {log_file}")
        except OSError as e:
            print(f"Error: Could not open log file '{log_file}': {e}", file=sys.stderr)

    logging.getLogger("eventgraph").debug(
        f"Logging configured at level {logging.getLevelName(log_level)}."
    )
