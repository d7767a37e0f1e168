"""Ordered fan-out of independent index ranges onto a thread pool."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

from nc_concentration.utils.config_loader import get_settings

T = TypeVar("T")


def worker_count(threads: int | None = None) -> int:
    """Resolved worker cap: explicit value, else settings (NC_THREADS), 0 meaning all cores."""
    if threads is None:
        threads = get_settings().runtime.threads
    if threads <= 0:
        return max(1, os.cpu_count() or 1)
    return threads


def chunk_ranges(total: int, chunks: int) -> list[range]:
    chunks = max(1, min(chunks, total)) if total > 0 else 1
    bounds = [total * i // chunks for i in range(chunks + 1)]
    return [range(bounds[i], bounds[i + 1]) for i in range(chunks)]


def ordered_map(fn: Callable[[range], T], total: int, threads: int | None = None) -> list[T]:
    """Apply ``fn`` to disjoint consecutive index ranges covering ``range(total)``.

    Results come back in ascending range order whatever the worker count, so any
    reduction the caller performs after concatenation is deterministic.
    """
    workers = worker_count(threads)
    ranges = chunk_ranges(total, workers * 4 if workers > 1 else 1)
    if workers == 1 or len(ranges) == 1:
        return [fn(r) for r in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, ranges))


def concat(parts: Sequence[Sequence[T]]) -> list[T]:
    out: list[T] = []
    for part in parts:
        out.extend(part)
    return out
