"""Console logging setup."""

from __future__ import annotations

from collections.abc import Mapping
import logging

import colorlog

LOG_FORMAT = "%(log_color)s%(asctime)s %(levelname)-8s%(reset)s %(name)s: %(message)s"
DATE_FORMAT = "%H:%M:%S"
LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}


def setup_logging(level: int | str = logging.INFO, logs: Mapping[str, str] | None = None) -> None:
    """Install one coloured stream handler on the root logger.

    ``logs`` maps logger names to levels, like the ``logs:`` block of a
    ``logger:`` section in a YAML config file.
    """
    handler = colorlog.StreamHandler()
    handler.setFormatter(
        colorlog.ColoredFormatter(LOG_FORMAT, datefmt=DATE_FORMAT, log_colors=LOG_COLORS)
    )
    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "henon_morse", False):
            root.removeHandler(existing)
    handler.henon_morse = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(_level(level))
    for name, name_level in (logs or {}).items():
        logging.getLogger(name).setLevel(_level(name_level))


def _level(level: int | str) -> int:
    if isinstance(level, int):
        return level
    return logging.getLevelNamesMapping()[level.upper()]
