"""Tests for the worker pool helpers."""

from __future__ import annotations

from functools import partial

import pytest

from henon_morse import concurrency
from henon_morse.concurrency import resolve_threads, run_calls
from henon_morse.errors import UsageError


def test_explicit_threads_win(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("HENON_MORSE_THREADS", "8")
    assert resolve_threads(3) == 3
    assert resolve_threads() == 8


def test_cpu_count_fallback(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(concurrency.os, "cpu_count", lambda: None)
    assert resolve_threads() == 1


@pytest.mark.parametrize("raw", ["x", "0", "-2"])
def test_invalid_environment(monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
    monkeypatch.setenv("HENON_MORSE_THREADS", raw)
    with pytest.raises(UsageError, match="HENON_MORSE_THREADS"):
        resolve_threads()


def test_invalid_argument() -> None:
    with pytest.raises(UsageError, match="threads must be ≥ 1"):
        resolve_threads(0)


def _square(value: int) -> int:
    if value < 0:
        msg = f"negative {value}"
        raise ValueError(msg)
    return value * value


@pytest.mark.parametrize("threads", [1, 3])
def test_run_calls_keeps_order_and_failures(threads: int) -> None:
    results = run_calls([partial(_square, value) for value in (3, -1, 2)], threads)
    assert results[0] == 9
    assert isinstance(results[1], ValueError)
    assert str(results[1]) == "negative -1"
    assert results[2] == 4


def test_run_calls_with_labels() -> None:
    assert run_calls([partial(_square, 5)], 2, labels=["five"]) == [25]
    assert run_calls([], 2) == []
