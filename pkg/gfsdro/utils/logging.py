"""Console and file logging for gfsdro runs.

The package logger is ``gfsdro``; module loggers hang below it. Samplers
may log from worker threads, so file records carry the thread name.
"""

import logging
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional, Union

import appdirs
from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER = "gfsdro"
RUN_LOG_NAME = "run.log"

CONSOLE_LEVEL = logging.INFO
FILE_LEVEL = logging.DEBUG
FILE_FORMAT = "%(asctime)s %(levelname)-7s [%(threadName)s] %(name)s: %(message)s"


def get_log_dir() -> Path:
    """Directory for session log files: ``GFSDRO_LOG_DIR`` or the user log dir."""
    from gfsdro.config import config

    log_dir = config.paths.log_dir or Path(appdirs.user_log_dir(ROOT_LOGGER, ROOT_LOGGER))
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def _file_handler(path: Path) -> logging.FileHandler:
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setLevel(FILE_LEVEL)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def setup_logging(
    debug: bool = False,
    log_file: Optional[Union[str, Path]] = None,
    log_to_file: bool = True,
    log_to_console: bool = True,
) -> logging.Logger:
    """
    Configure the ``gfsdro`` logger for a CLI session.

    Console output goes through Rich on stderr, so tables printed to stdout
    stay clean. The session file, when enabled, always records DEBUG.

    Args:
        debug: Show DEBUG records (and source paths) on the console
        log_file: Session log path. Defaults to one file per day in get_log_dir()
        log_to_file: Whether to keep a session log file
        log_to_console: Whether to log to the console

    Returns:
        The configured package logger
    """
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_level = logging.DEBUG if debug else CONSOLE_LEVEL
    logger.setLevel(min(console_level, FILE_LEVEL) if log_to_file else console_level)

    if log_to_console:
        rich_handler = RichHandler(
            level=console_level,
            console=Console(stderr=True),
            rich_tracebacks=True,
            tracebacks_show_locals=debug,
            show_path=debug,
        )
        rich_handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(rich_handler)

    if log_to_file:
        if log_file is None:
            log_file = get_log_dir() / f"{ROOT_LOGGER}_{datetime.now():%Y%m%d}.log"
        log_file = Path(log_file)
        logger.addHandler(_file_handler(log_file))
        logger.debug(f"Session log: {log_file}")

    return logger


@contextmanager
def run_log(run_dir: Union[str, Path]) -> Iterator[Path]:
    """
    Mirror every ``gfsdro`` record at DEBUG into ``<run_dir>/run.log``
    for the duration of the block.

    The package logger's level is lowered to DEBUG while the block runs
    and restored afterwards.
    """
    path = Path(run_dir) / RUN_LOG_NAME
    logger = logging.getLogger(ROOT_LOGGER)
    handler = _file_handler(path)
    previous = logger.level
    if previous == logging.NOTSET or previous > FILE_LEVEL:
        logger.setLevel(FILE_LEVEL)
    logger.addHandler(handler)
    try:
        yield path
    finally:
        logger.removeHandler(handler)
        handler.close()
        logger.setLevel(previous)


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """Logger for ``name``, placed under the ``gfsdro`` hierarchy."""
    if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)
