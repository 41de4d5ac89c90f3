"""Deterministic seeding and order-preserving parallel maps for random-state sweeps."""

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

logger = logging.getLogger(__name__)

MAX_WORKERS_ENV = "SPINBATH_MAX_WORKERS"

__all__ = ["derive_seed", "task_rng", "max_workers", "parallel_map"]


def derive_seed(root_seed: int, task_index: int) -> int:
    """The 64-bit seed of one task: SeedSequence([root_seed, task_index]) -> first uint64 word."""
    seq = np.random.SeedSequence([root_seed, task_index])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def task_rng(root_seed: int, task_index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root_seed, task_index))


def max_workers() -> int:
    """Worker cap from SPINBATH_MAX_WORKERS, else the CPU count."""
    cpus = os.cpu_count() or 1
    env = os.getenv(MAX_WORKERS_ENV)
    if not env:
        return cpus
    try:
        return max(1, int(env))
    except ValueError:
        logger.warning(f"Ignoring non-integer {MAX_WORKERS_ENV}={env!r}")
        return cpus


def parallel_map[T, R](fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply fn to every item on a thread pool; results come back in input order."""
    work = list(items)
    workers = min(max_workers(), len(work)) or 1
    if workers == 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))
