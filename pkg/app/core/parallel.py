"""
Worker pools for independent evaluation tasks.

Exact results must not depend on scheduling: ``parallel_map`` always returns results
in input order and callers reduce them in that order.
"""
import logging
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int]) -> int:
    """Effective worker count; ``WORKER_THREADS`` in the environment overrides the flag."""
    if settings.WORKER_THREADS is not None:
        return max(1, settings.WORKER_THREADS)
    return max(1, threads or 1)


def _executor(workers: int) -> Executor:
    if settings.WORKER_BACKEND == "process":
        return ProcessPoolExecutor(max_workers=workers)
    return ThreadPoolExecutor(max_workers=workers)


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Ordered map of ``func`` over ``items``.

    Args:
        func: Pure task function (must be picklable for the process backend)
        items: Task inputs
        threads: Worker count; None or 1 runs inline

    Returns:
        Results in the order of ``items``
    """
    items = list(items)
    workers = resolve_threads(threads)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"[Parallel] {len(items)} tasks on {min(workers, len(items))} {settings.WORKER_BACKEND} workers")
    with _executor(min(workers, len(items))) as pool:
        return list(pool.map(func, items))

