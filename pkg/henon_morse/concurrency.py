"""Worker pool helpers for concurrent mode and bundle solves."""

from __future__ import annotations

import asyncio
from concurrent.futures import ThreadPoolExecutor
import logging
import os
from typing import TYPE_CHECKING

from .const import ENV_THREADS
from .errors import UsageError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_LOGGER = logging.getLogger(__name__)


def resolve_threads(requested: int | None = None) -> int:
    """Return the worker cap from the argument, the environment or the CPU count."""
    if requested is not None:
        if requested < 1:
            msg = f"threads must be ≥ 1, got {requested}"
            raise UsageError(msg)
        return requested
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            threads = int(raw)
        except ValueError as err:
            msg = f"{ENV_THREADS} must be a positive integer, got {raw!r}"
            raise UsageError(msg) from err
        if threads < 1:
            msg = f"{ENV_THREADS} must be a positive integer, got {raw!r}"
            raise UsageError(msg)
        return threads
    return os.cpu_count() or 1


async def async_gather_calls[T](
    calls: Sequence[Callable[[], T]],
    executor: ThreadPoolExecutor,
) -> list[T | BaseException]:
    """Run blocking calls on the executor and gather results or exceptions in order."""
    loop = asyncio.get_running_loop()
    return await asyncio.gather(
        *(loop.run_in_executor(executor, call) for call in calls),
        return_exceptions=True,
    )


def run_calls[T](
    calls: Sequence[Callable[[], T]],
    threads: int,
    *,
    labels: Sequence[str] | None = None,
) -> list[T | BaseException]:
    """Run calls concurrently; failures are logged and returned in place."""

    async def _run() -> list[T | BaseException]:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return await async_gather_calls(calls, executor)

    results = asyncio.run(_run())
    names = labels or [str(index) for index in range(len(calls))]
    for name, result in zip(names, results, strict=True):
        if isinstance(result, BaseException):
            _LOGGER.debug("Task %s failed: %s", name, result)
    return results
