# harness/replicas.py

import logging
from typing import Any, Callable, List, Sequence, TypeVar

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.utils.parallel import map_tasks
from contact_lattice.utils.rng import derive_stream

R = TypeVar("R")

logger = logging.getLogger(__name__)

ReplicaFn = Callable[[Any, np.random.Generator], R]


def _invoke(task) -> Any:
    fn, payload, master_seed, index, labels = task
    return fn(payload, derive_stream(master_seed, index, *labels))


def run_indexed(fn: ReplicaFn, payloads: Sequence[Any], master_seed: int, workers: int = 1,
                labels: Sequence[object] = ()) -> List[R]:
    """Replica i runs fn(payloads[i], derive_stream(master_seed, i, *labels)); results in index order.

    Replicas share nothing but their payloads; with workers > 1 `fn` and the
    payloads must be picklable.
    """
    if len(payloads) < 1:
        raise ParameterError("Need at least one replica")
    tasks = [(fn, payload, int(master_seed), i, tuple(labels)) for i, payload in enumerate(payloads)]
    logger.debug("Running %d replica(s) of %s on %d worker(s)", len(tasks),
                 getattr(fn, "__name__", fn), workers)
    return map_tasks(_invoke, tasks, workers)


def run_replicas(fn: ReplicaFn, payload: Any, master_seed: int, count: int, workers: int = 1,
                 labels: Sequence[object] = ()) -> List[R]:
    """`count` replicas of fn on one shared payload."""
    if count < 1:
        raise ParameterError(f"Need at least one replica, got {count}")
    return run_indexed(fn, [payload] * count, master_seed, workers, labels)
