"""Thread fan-out with deterministic result order."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError


def worker_count() -> int:
    """Worker cap from PCAL_THREADS, else the CPU count."""
    raw = os.environ.get("PCAL_THREADS")
    if raw is None or raw == "":
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"PCAL_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"PCAL_THREADS must be a positive integer, got {raw!r}")
    return n


def pmap(fn, items) -> list:
    """[fn(x) for x in items], evaluated on a thread pool; order is preserved."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
