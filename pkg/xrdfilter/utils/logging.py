"""Package logging: one stderr handler on the ``xrdfilter`` logger, children propagate to it."""

from __future__ import annotations

import logging
from typing import Union

from .. import settings
from ..errors import UsageError

PACKAGE = "xrdfilter"
_LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _level_number(level: Union[int, str]) -> int:
    if isinstance(level, int):
        return level
    name = str(level).strip().upper()
    if name not in _LEVELS:
        raise UsageError(f"unknown log level {level!r}; choose from {', '.join(_LEVELS)}")
    return logging.getLevelName(name)


def _package_logger() -> logging.Logger:
    root = logging.getLogger(PACKAGE)
    if not root.handlers:
        # stdout carries command output, so logs go to stderr
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        root.addHandler(handler)
        root.propagate = False
        try:
            root.setLevel(_level_number(settings.LOG_LEVEL))
        except UsageError:
            root.setLevel(logging.INFO)
            root.warning("Ignoring XRDFILTER_LOG_LEVEL=%r", settings.LOG_LEVEL)
    return root


def get_logger(name: str) -> logging.Logger:
    """Logger under the package root; modules pass ``__name__``."""
    root = _package_logger()
    if name == PACKAGE or name.startswith(PACKAGE + "."):
        return logging.getLogger(name)
    return root.getChild(name)


def set_level(level: Union[int, str]) -> None:
    """Level of the package root; the --log-level flag ends up here."""
    _package_logger().setLevel(_level_number(level))
