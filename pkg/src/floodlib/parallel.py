"""Ordered fan-out of independent runs (folds, seeds, sweep points)."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, TypeVar

T = TypeVar("T")

ProgressCallback = Callable[[int, int, str], None]


def run_ordered(
    jobs: Sequence[Callable[[], T]],
    workers: int = 1,
    *,
    on_progress: Optional[ProgressCallback] = None,
    label: str = "",
) -> list[T]:
    """Run jobs and return their results in submission order.

    ``workers <= 1`` runs sequentially in the calling thread. The first job
    exception propagates after the pool shuts down.
    """
    total = len(jobs)
    results: list[T] = []
    if workers <= 1:
        for done, job in enumerate(jobs, start=1):
            results.append(job())
            if on_progress:
                on_progress(done, total, label)
        return results

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(job) for job in jobs]
        for done, future in enumerate(futures, start=1):
            results.append(future.result())
            if on_progress:
                on_progress(done, total, label)
    return results
