"""Logging helper functions."""

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "ehcavity"


def _package_logger() -> logging.Logger:
    """Attach a single rich handler (on stderr) to the package logger."""
    root = logging.getLogger(PACKAGE_LOGGER)
    if not root.handlers:
        handler = RichHandler(
            console=Console(stderr=True), rich_tracebacks=True, show_path=False
        )
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        root.addHandler(handler)
        root.setLevel(os.getenv("LOG_LEVEL", logging.INFO))
    return root


def get_logger(name: str) -> logging.Logger:
    """
    Get logger with rich configuration.

    :param name: Module name or file path (`__file__`) of the caller
    :return: Child logger of the `ehcavity` package logger
    """
    _package_logger()
    stem = os.path.splitext(os.path.basename(name))[0]
    return logging.getLogger(f"{PACKAGE_LOGGER}.{stem}")


def set_verbose(logger: logging.Logger) -> None:
    """Set logger to DEBUG level when user requests verbosity."""
    verbose_level = logging.DEBUG
    if logger.getEffectiveLevel() > verbose_level:
        logger.setLevel(verbose_level)
        logger.debug(
            f"Verbose mode: setting log level to {logging.getLevelName(verbose_level)}"
        )
