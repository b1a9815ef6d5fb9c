"""
Parameter sweeps over independent grid points
"""
import concurrent.futures as futures
from typing import Callable, Iterable, List, Optional, TypeVar

from loguru import logger

from glstep.config import settings

T = TypeVar("T")
R = TypeVar("R")


def run_grid(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply `fn` to every item, in worker processes when threads > 1.

    Results come back in input order regardless of completion order. `fn`
    and the items must be picklable for the process pool.
    """
    items = list(items)
    threads = settings.threads if threads is None else threads
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(items) < 2:
        return [fn(item) for item in items]

    logger.debug(f"Sweeping {len(items)} points on {threads} workers")
    with futures.ProcessPoolExecutor(max_workers=threads) as executor:
        wait_for = [executor.submit(fn, item) for item in items]
        return [f.result() for f in wait_for]
