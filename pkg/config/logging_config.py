"""Loguru logging configuration for the Onsager lab.

Two kinds of sinks are used. ``setup_logging()`` is called once at startup
and installs a colorized console handler plus a per-invocation file under
``logs/`` that is overwritten each time. ``add_run_log()`` attaches a log to
one run's output directory; it is appended to, so a run that was interrupted
and resumed from its manifest keeps a single history next to its tables.
"""

from __future__ import annotations

import sys
from pathlib import Path

from loguru import logger

RUN_LOG_NAME = "run.log"

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} | {message}"

_LEVEL_COLORS = {
    "DEBUG": "<cyan>",
    "INFO": "<white>",
    "SUCCESS": "<green>",
    "WARNING": "<yellow>",
    "ERROR": "<red>",
    "CRITICAL": "<RED><bold>",
}


def setup_logging(
    log_level: str = "INFO",
    log_file: str = "onsagerlab.log",
    log_dir: str | Path | None = None,
):
    """Configure loguru handlers for console and file output.

    Removes every existing handler, then adds a colorized stderr handler
    and a plain-text file handler that is overwritten on each call
    (``mode="w"``).

    Args:
        log_level: Minimum log level to emit (for example, ``"DEBUG"``
            to follow every epsilon of a sweep).
        log_file: Filename of the log file.
        log_dir: Directory of the log file; ``logs/`` when omitted.

    Returns:
        The configured ``loguru.logger`` instance.
    """
    logger.remove()
    for level, color in _LEVEL_COLORS.items():
        logger.level(level, color=color)

    logs_dir = Path(log_dir) if log_dir is not None else Path("logs")
    logs_dir.mkdir(parents=True, exist_ok=True)

    logger.add(
        sys.stderr,
        format=CONSOLE_FORMAT,
        level=log_level,
        colorize=True,
        backtrace=True,
        diagnose=False,
    )
    logger.add(
        logs_dir / log_file,
        format=FILE_FORMAT,
        level=log_level,
        mode="w",
        encoding="utf-8",
        backtrace=True,
        diagnose=False,
    )
    return logger


def add_run_log(out_dir: str | Path, log_level: str = "INFO") -> int:
    """Append this invocation's messages to ``<out_dir>/run.log``.

    Args:
        out_dir: Output directory of the run.
        log_level: Minimum log level written to the run log.

    Returns:
        The loguru handler id; pass it to ``logger.remove`` when the command
        finishes.
    """
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return logger.add(
        path / RUN_LOG_NAME,
        format=FILE_FORMAT,
        level=log_level,
        mode="a",
        encoding="utf-8",
        backtrace=False,
        diagnose=False,
    )
