"""
Structured Logging - JSON-formatted log lines with context.

Solvers and checks emit named events with numeric fields; numpy scalars and
small arrays are converted so every line stays valid JSON.

Usage:
    from src.services.logger import get_logger

    logger = get_logger(__name__)
    logger.info("solver_converged", solver="nehari", iterations=412, gradient_norm=7.1e-9)
"""
import json
import logging
import sys
from datetime import datetime
from typing import Any, Dict, Optional

import numpy as np

_RESERVED = frozenset(logging.LogRecord("", 0, "", 0, "", (), None).__dict__) | {"message", "asctime"}
# Keys the formatter writes itself
_OWN_KEYS = frozenset(("timestamp", "level", "logger", "location", "exception"))


def _plain(value: Any) -> Any:
    """Convert numpy values into JSON-native ones."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _field_key(key: str) -> str:
    """Event field name that cannot clash with a LogRecord attribute or a formatter key."""
    return f"field_{key}" if key in _RESERVED or key in _OWN_KEYS else key


class StructuredFormatter(logging.Formatter):
    """
    Formatter that outputs one JSON object per record.

    Output format:
    {"timestamp": "...", "level": "INFO", "logger": "solve", "message": "solver_start", ...extra}
    """

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.levelno >= logging.WARNING:
            log_data["location"] = f"{record.filename}:{record.lineno}"

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RESERVED:
                log_data[key] = _plain(value)

        return json.dumps(log_data, default=str)


class ContextLogger(logging.Logger):
    """
    Logger that accepts event fields as keyword arguments.

    Example:
        logger.info("check_failed", check="hardy", measured=-1e-6)
        log = logger.bind(solver="nehari")
        log.progress("solver_progress", iteration, every=100, value=q)
    """

    def __init__(self, name: str, level: int = logging.NOTSET):
        super().__init__(name, level)
        self._context: Dict[str, Any] = {}

    def bind(self, **kwargs) -> 'ContextLogger':
        """Create a child logger with bound context."""
        child = ContextLogger(self.name)
        child._context = {**self._context, **kwargs}
        child.handlers = self.handlers
        child.level = self.level
        child.parent = self.parent
        child.propagate = self.propagate
        return child

    def _log_with_context(self, severity: int, msg: str, args: tuple, /,
                          exc_info=None, extra: Optional[Dict] = None, **fields):
        merged = {**self._context, **(extra or {}), **fields}
        safe = {_field_key(k): v for k, v in merged.items()}
        super()._log(severity, msg, args, exc_info=exc_info, extra=safe)

    def debug(self, msg: str, /, *args, **fields):
        if self.isEnabledFor(logging.DEBUG):
            self._log_with_context(logging.DEBUG, msg, args, **fields)

    def info(self, msg: str, /, *args, **fields):
        if self.isEnabledFor(logging.INFO):
            self._log_with_context(logging.INFO, msg, args, **fields)

    def warning(self, msg: str, /, *args, **fields):
        if self.isEnabledFor(logging.WARNING):
            self._log_with_context(logging.WARNING, msg, args, **fields)

    def error(self, msg: str, /, *args, exc_info=None, **fields):
        if self.isEnabledFor(logging.ERROR):
            self._log_with_context(logging.ERROR, msg, args, exc_info=exc_info, **fields)

    def progress(self, event: str, iteration: int, /, every: int, **fields) -> bool:
        """Log an iteration event at INFO every ``every`` iterations; 0 disables it."""
        if not every or iteration % every != 0:
            return False
        self.info(event, iteration=iteration, **fields)
        return True

    def verdict(self, check: str, passed: bool, /, **fields) -> None:
        """check_passed at INFO, check_failed at WARNING."""
        if passed:
            self.info("check_passed", check=check, **fields)
        else:
            self.warning("check_failed", check=check, **fields)


logging.setLoggerClass(ContextLogger)


def setup_structured_logging(
    level: int = logging.INFO,
    json_output: bool = True,
    stream=None
) -> None:
    """
    Configure the root logger.

    Args:
        level: Logging level (default INFO)
        json_output: If True, use JSON format; otherwise a plain text format
        stream: Output stream (default sys.stderr, keeping stdout for summaries)
    """
    root = logging.getLogger()
    root.setLevel(level)
    root.handlers.clear()

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setLevel(level)

    if json_output:
        handler.setFormatter(StructuredFormatter())
    else:
        handler.setFormatter(logging.Formatter(
            "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
        ))

    root.addHandler(handler)


def get_logger(name: str) -> ContextLogger:
    """
    Get a structured logger for the given module.

    Args:
        name: Logger name (typically __name__)
    """
    logger = logging.getLogger(name)
    if not isinstance(logger, ContextLogger):
        # Created before this module was imported; rebuild under the same name
        logging.Logger.manager.loggerDict.pop(name, None)
        logger = logging.getLogger(name)
    return logger


def get_solver_logger() -> ContextLogger:
    """Logger for descent and path iterations."""
    return get_logger("solve")


def get_check_logger() -> ContextLogger:
    """Logger for audit checks."""
    return get_logger("verify")
