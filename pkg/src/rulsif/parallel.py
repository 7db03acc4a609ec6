"""Order-preserving parallel map with single-threaded BLAS.

Results never depend on the worker count: every task is a pure function of
its arguments (seeds included) and results come back in submission order.
BLAS is pinned to one thread everywhere so that matrix products use the same
summation order in every process.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional

from threadpoolctl import threadpool_limits

THREADS_ENV = "RULSIF_THREADS"


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def _init_worker():
    threadpool_limits(1)


def _star(args):
    fn, a = args
    return fn(*a)


def pmap(fn: Callable, tasks: Iterable[tuple], threads: Optional[int] = 1) -> List:
    """``[fn(*t) for t in tasks]``, spread over ``threads`` worker processes."""
    tasks = list(tasks)
    threads = resolve_threads(threads)
    with threadpool_limits(1):
        if threads == 1 or len(tasks) <= 1:
            return [fn(*t) for t in tasks]
        chunk = max(1, len(tasks) // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker) as ex:
            return list(ex.map(_star, [(fn, t) for t in tasks], chunksize=chunk))
