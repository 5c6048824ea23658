from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def default_workers() -> int:
    return os.cpu_count() or 1


def ordered_map(fn, items, workers: int | None = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; result order is input order."""
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
