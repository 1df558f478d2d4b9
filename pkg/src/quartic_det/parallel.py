"""Order-preserving thread map capped by ``QUARTIC_DET_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .exceptions import ConfigurationError

ENV_VAR = "QUARTIC_DET_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR, "")
    if not raw:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigurationError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def pmap(fn, items) -> list:
    """``[fn(x) for x in items]``, possibly on threads; results keep input order."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
