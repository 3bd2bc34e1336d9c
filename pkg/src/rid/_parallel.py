"""Column-partitioned execution of nogil kernels on a thread pool.

Every kernel dispatched here has the signature ``kernel(*args, start, stop)``
and must only write to columns in ``[start, stop)``. Because each column is
processed by the same compiled code in a fixed internal order, results do not
depend on how the column range is split.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache


def default_workers():
    return os.cpu_count() or 1


def resolve_workers(workers):
    if workers is None:
        return default_workers()
    workers = int(workers)
    if workers < 1:
        from .errors import ContractViolation

        raise ContractViolation(f"worker count must be >= 1, got {workers}")
    return workers


@lru_cache(maxsize=None)
def _pool(workers):
    return ThreadPoolExecutor(max_workers=workers, thread_name_prefix=f"rid-w{workers}")


def column_bounds(n, parts):
    """Split ``range(n)`` into at most `parts` contiguous, near-equal chunks."""
    parts = max(1, min(parts, n))
    base, extra = divmod(n, parts)
    bounds = []
    start = 0
    for i in range(parts):
        stop = start + base + (1 if i < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds


def run_columns(kernel, n, workers, *args):
    """Run ``kernel(*args, start, stop)`` over columns ``0..n-1``."""
    if n <= 0:
        return
    if workers <= 1 or n == 1:
        kernel(*args, 0, n)
        return
    chunks = column_bounds(n, workers)
    futures = [_pool(workers).submit(kernel, *args, lo, hi) for lo, hi in chunks]
    for fut in futures:
        fut.result()
