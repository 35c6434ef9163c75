"""Worker pool for independent experiment tasks.

Tasks run on a thread pool through the event loop's executor and are
gathered in submission order, so results never depend on the pool size.
"""

from __future__ import annotations

import asyncio
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, Iterable, TypeVar

from errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "POLYFREG_THREADS"


def default_threads() -> int:
    """``POLYFREG_THREADS`` if set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from None
        if threads < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {threads}")
        return threads
    return os.cpu_count() or 1


async def gather_tasks(fn: Callable[[T], R], tasks: Iterable[T], threads: int) -> list[R]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [loop.run_in_executor(pool, partial(fn, task)) for task in tasks]
        return list(await asyncio.gather(*futures))


def run_tasks(fn: Callable[[T], R], tasks: Iterable[T], threads: int = 1) -> list[R]:
    """Apply ``fn`` to every task; results come back in task order."""
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    logger.debug("running %d tasks on %d threads", len(tasks), threads)
    return asyncio.run(gather_tasks(fn, tasks, threads))
