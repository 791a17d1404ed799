"""Worker-pool plumbing shared by the quadrature and energy modules."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["worker_count", "map_ordered"]


def worker_count() -> int:
    """Worker cap from NONLOCAL_LAB_THREADS (0 = auto, unset = serial)."""
    raw = os.environ.get("NONLOCAL_LAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def map_ordered(fn, items):
    """Map preserving input order; parallel only when workers > 1.

    Results are reduced in input order by construction, so values are
    independent of the degree of parallelism.
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
