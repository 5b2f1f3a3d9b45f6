"""Process-wide knobs: worker thread count for batched kernels."""

from __future__ import annotations

import os

_threads = max(1, int(os.environ.get("DIFFCOMB_THREADS", "1")))


def get_threads() -> int:
    return _threads


def set_threads(n: int) -> None:
    global _threads
    n = int(n)
    if n < 1:
        raise ValueError("thread count must be >= 1")
    _threads = n
