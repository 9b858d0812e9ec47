"""Trial scheduling helpers shared by the Monte Carlo estimators."""

from __future__ import annotations

import contextlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def map_trials(fn: Callable[[int], T], trials: int, threads: int = 1) -> list[T]:
    """Evaluate fn(0..trials-1) and return the results in trial order.

    Each trial must be a pure function of its index (independent rng
    substream), so the schedule cannot change any value and the ordered
    reduction downstream is invariant to the worker count.
    """
    if trials < 0:
        raise ValueError("trials must be >= 0")
    if threads <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(trials)))


def single_thread_blas():
    """Pin BLAS/LAPACK to one thread for the duration of a suite run.

    Keeps per-call linear algebra bitwise reproducible regardless of how
    many worker threads schedule trials on top of it.
    """
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover - declared dependency
        return contextlib.nullcontext()
    return threadpool_limits(limits=1)


def reduce_mean(values: Sequence[float]) -> float:
    """Order-exact mean (math.fsum), stable under any trial schedule."""
    import math

    if not values:
        raise ValueError("cannot average an empty sequence")
    return math.fsum(values) / len(values)
