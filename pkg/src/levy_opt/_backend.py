"""Kernel backend selection and deterministic block-parallel execution.

The compiled kernels are used when importable; ``LEVY_OPT_BACKEND=python``
forces the numpy fallback.  ``LEVY_OPT_THREADS`` caps the worker count.
Work is cut into fixed path blocks independent of the thread count, and
every block writes a disjoint slice of preallocated arrays, so results do
not depend on scheduling.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from types import ModuleType
from typing import Callable

from . import _pykernels

log = logging.getLogger(__name__)

BLOCK = 1 << 15


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("LEVY_OPT_BACKEND", "").lower() in ("python", "numpy", "fallback"):
        return _pykernels, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        log.debug("compiled kernels unavailable; using numpy fallback")
        return _pykernels, "python"
    return _kernels, "compiled"


kernels, BACKEND = _load()


def get_kernels(name: str | None = None) -> ModuleType:
    """Kernel module by name (``"compiled"`` / ``"python"``); default is the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "compiled":
        from . import _kernels  # type: ignore[attr-defined]
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def thread_count() -> int:
    raw = os.environ.get("LEVY_OPT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"LEVY_OPT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"LEVY_OPT_THREADS must be a positive integer, got {raw!r}")
    return n


def run_blocks(n_paths: int, work: Callable[[int, int], None], threads: int | None = None) -> None:
    """Call ``work(start, stop)`` over fixed blocks covering ``range(n_paths)``."""
    blocks = [(s, min(n_paths, s + BLOCK)) for s in range(0, n_paths, BLOCK)]
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(blocks) <= 1:
        for s, e in blocks:
            work(s, e)
        return
    with ThreadPoolExecutor(max_workers=min(threads, len(blocks))) as pool:
        for fut in [pool.submit(work, s, e) for s, e in blocks]:
            fut.result()
