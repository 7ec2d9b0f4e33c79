"""Bounded thread pool for embarrassingly parallel scenario work.

The OPENDECAY_THREADS environment variable caps the worker count; the
default is the machine's CPU count.  Results keep input order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError

__all__ = ["worker_count", "parallel_map"]


def worker_count(n_tasks: int) -> int:
    cap = os.cpu_count() or 1
    raw = os.environ.get("OPENDECAY_THREADS")
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(
                f"OPENDECAY_THREADS must be an integer, got {raw!r}"
            ) from None
        if cap < 1:
            raise ConfigError("OPENDECAY_THREADS must be at least 1")
    return max(1, min(cap, n_tasks))


def parallel_map(fn, items):
    items = list(items)
    workers = worker_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
