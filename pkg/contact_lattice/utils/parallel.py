# utils/parallel.py

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def map_tasks(fn: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> List[R]:
    """Run independent tasks, results in task order.

    workers <= 1 runs in-process. Larger values use a process pool, so `fn`
    and the tasks must be picklable (module-level functions, plain data).
    """
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    logger.debug("Dispatching %d tasks to %d workers", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
