"""Order-preserving map over trial indices, optionally across processes."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def default_threads() -> int:
    return os.cpu_count() or 1


def _run_chunk(args):
    fn, items = args
    return [fn(x) for x in items]


def parallel_map(fn, items, threads: int | None = 1):
    """``[fn(x) for x in items]``; with ``threads > 1`` chunks run in worker processes.

    ``fn`` must be picklable (a module-level function or a ``functools.partial``
    of one). The result order never depends on ``threads``.
    """
    items = list(items)
    if threads is None:
        threads = default_threads()
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    k = min(threads, len(items))
    size = -(-len(items) // k)
    chunks = [items[i : i + size] for i in range(0, len(items), size)]
    with ProcessPoolExecutor(max_workers=k) as pool:
        parts = list(pool.map(_run_chunk, [(fn, c) for c in chunks]))
    return [y for part in parts for y in part]
