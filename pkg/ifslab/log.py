"""Logging setup: one rich handler on the package logger."""

import logging

from rich.console import Console
from rich.logging import RichHandler

LOGGER_NAME = "ifslab"


def configure_logging(verbose: bool = False) -> logging.Logger:
    """Attach a ``RichHandler`` writing to stderr; idempotent."""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)

    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=Console(stderr=True),
            show_time=False,
            show_path=False,
            markup=False,
        )
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
    return logger
