"""Job dispatcher for parallel sweep evaluation."""
import asyncio
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


async def dispatch_jobs(func: Callable[[T], R], tasks: Sequence[T], workers: int) -> list[R]:
    """
    Run ``func`` over ``tasks`` in a process pool.

    Results come back in task order regardless of completion order, so
    assembly is independent of the worker count.
    """
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [loop.run_in_executor(pool, func, task) for task in tasks]
        return list(await asyncio.gather(*futures))


def run_jobs(func: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> list[R]:
    """Evaluate tasks inline (one worker) or through :func:`dispatch_jobs`."""
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    logger.info("dispatching %d jobs to %d workers", len(tasks), workers)
    return asyncio.run(dispatch_jobs(func, tasks, workers))
