"""Fixed-topology blocked evaluation so that results never depend on the thread count."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

#: Rows per block.
BLOCK = 128

_default_threads = 1


def set_num_threads(threads: int) -> None:
    """Bound the worker threads used for pair sums."""
    global _default_threads
    if threads < 1:
        raise ValueError("threads must be >= 1")
    _default_threads = int(threads)


def get_num_threads() -> int:
    return _default_threads


def blocks(n):
    return [slice(k, min(k + BLOCK, n)) for k in range(0, n, BLOCK)]


def map_blocks(fn, n, threads=None):
    threads = threads or _default_threads
    bl = blocks(n)
    if threads == 1 or len(bl) == 1:
        return [fn(b) for b in bl]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, bl))
