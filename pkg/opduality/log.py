"""
Logging for opduality.

One loguru logger for the package. Every record carries the suite it was emitted from and
that suite's seed (`-` outside a suite), so interleaved suite output stays attributable.
The console level comes from OPDUALITY_LOG_LEVEL.
"""

import sys
from contextlib import contextmanager
from typing import Iterable, Iterator, Optional

from loguru import logger as _logger
from opduality.config import LOG_LEVEL

_CONTEXT = "{extra[suite]}:{extra[seed]}"
_CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <magenta>" + _CONTEXT + "</magenta> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
_FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | " + _CONTEXT + " | {name}:{function}:{line} - {message}"

_logger.configure(extra={"suite": "-", "seed": "-"})
_logger.remove()
_console_id = _logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=LOG_LEVEL, colorize=True)


def set_log_level(level: str):
    """Replace the console sink at `level`; file sinks are untouched."""
    global _console_id
    _logger.remove(_console_id)
    _console_id = _logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=level.upper(), colorize=True)


def add_file_logger(log_file: str, level: str = "DEBUG") -> int:
    """
    Add a rotating file sink that records the suite context.

    Example:
        >>> from opduality.log import add_file_logger
        >>> add_file_logger("opduality.log", "INFO")
    """
    return _logger.add(log_file, format=_FILE_FORMAT, level=level.upper(), rotation="10 MB", retention="7 days")


@contextmanager
def suite_context(suite: str, seed: Optional[int] = None) -> Iterator[None]:
    """Tag every record emitted inside the block with the suite name and seed."""
    with _logger.contextualize(suite=suite, seed="-" if seed is None else seed):
        yield


def log_checks(checks: Iterable) -> int:
    """Failed checks at WARNING, passing ones at DEBUG; returns the number of failures."""
    failures = 0
    for check in checks:
        if check.passed:
            _logger.debug(f"{check.name}: {check.residual:.3e} <= {check.tolerance:.1e}")
        else:
            failures += 1
            _logger.warning(f"Check failed: {check.name} residual {check.residual:.3e} > {check.tolerance:.1e}")
    return failures


logger = _logger

__all__ = ["logger", "set_log_level", "add_file_logger", "suite_context", "log_checks", "LOG_LEVEL"]
