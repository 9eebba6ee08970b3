"""
Structured logging configuration using standard library logging.
Provides run ID tracking and structured output.
"""

import json
import logging
import sys
import uuid
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Iterator, Optional


# Context variable to store the run ID of the solver run / convergence level in progress
run_id_var: ContextVar[str] = ContextVar("run_id", default="")

_RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "asctime"}


def get_run_id() -> str:
    """Get the current run ID."""
    return run_id_var.get()


@contextmanager
def run_context(run_id: Optional[str] = None) -> Iterator[str]:
    """
    Bind a run ID for the duration of a block.

    Args:
        run_id: Run ID to bind; a fresh short UUID when omitted

    Yields:
        The bound run ID
    """
    token = run_id_var.set(run_id or uuid.uuid4().hex[:12])
    try:
        yield run_id_var.get()
    finally:
        run_id_var.reset(token)


class StructuredFormatter(logging.Formatter):
    """Custom formatter that outputs structured JSON logs."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if getattr(record, "run_id", ""):
            log_data["run_id"] = record.run_id

        # Fields passed through ``extra=``
        for key, value in record.__dict__.items():
            if key not in _RESERVED and key != "run_id":
                log_data[key] = value

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


class RunIdFilter(logging.Filter):
    """Filter that adds the current run ID to log records."""

    def filter(self, record: logging.LogRecord) -> bool:
        """Add run ID to record."""
        if not hasattr(record, "run_id"):
            record.run_id = get_run_id()
        return True


def setup_logging(log_level: str = "INFO", use_json: bool = True) -> None:
    """
    Configure application logging.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        use_json: Whether to use JSON formatting
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    # Diagnostics go to stderr; stdout is reserved for command output
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(log_level)
    handler.addFilter(RunIdFilter())

    if use_json:
        formatter: logging.Formatter = StructuredFormatter()
    else:
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - [%(run_id)s] %(message)s"
        )

    handler.setFormatter(formatter)
    root_logger.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
