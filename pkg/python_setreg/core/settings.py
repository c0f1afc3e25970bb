"""Process-level settings read from the environment."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .errors import ConfigError

T = TypeVar("T")
U = TypeVar("U")

THREADS_ENV = "SETREG_THREADS"


def worker_count(environ: Optional[dict] = None) -> int:
    """Number of worker threads, capped by ``SETREG_THREADS`` when set."""
    env = os.environ if environ is None else environ
    default = max(1, min(4, os.cpu_count() or 1))
    raw = env.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def parallel_map(func: Callable[[T], U], items: Iterable[T]) -> List[U]:
    """Map ``func`` over ``items`` on the worker pool, preserving input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
