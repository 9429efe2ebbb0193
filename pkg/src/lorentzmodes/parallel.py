"""Deterministic thread-pool map for per-wavenumber work items.

Results are returned in input order regardless of scheduling, so reductions
stay reproducible.  Thread count resolution: explicit argument, then the
LORENTZMODES_THREADS environment variable, then serial.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

ENV_THREADS = "LORENTZMODES_THREADS"


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def parallel_map(fn: Callable, items: Sequence, threads: Optional[int] = None) -> list:
    n = resolve_threads(threads)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
