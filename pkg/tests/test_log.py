"""Tests for the console logging setup."""

from __future__ import annotations

from collections.abc import Iterator
import logging

import pytest

from henon_morse.log import setup_logging


@pytest.fixture
def _restore_logging() -> Iterator[None]:
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    child = logging.getLogger("henon_morse.spectral")
    child_level = child.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
    child.setLevel(child_level)


@pytest.mark.usefixtures("_restore_logging")
def test_levels_are_applied() -> None:
    setup_logging("debug", {"henon_morse.spectral": "warning"})
    assert logging.getLogger().level == logging.DEBUG
    assert logging.getLogger("henon_morse.spectral").level == logging.WARNING


@pytest.mark.usefixtures("_restore_logging")
def test_handler_is_installed_once() -> None:
    setup_logging(logging.INFO)
    setup_logging("warning")
    tagged = [h for h in logging.getLogger().handlers if getattr(h, "henon_morse", False)]
    assert len(tagged) == 1
    assert logging.getLogger().level == logging.WARNING
