# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Thread pool for path blocks.

numpy releases the GIL inside its kernels, so path blocks simulate in
parallel on plain threads. Results always come back in block order, which
keeps every estimate independent of the worker count.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit value, else one per CPU."""
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads


def map_blocks(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """
    Apply fn to every item, possibly in parallel, returning results in item order.

    Args:
        fn: Function of one item. Must not mutate shared state.
        items: Work items (typically block indices).
        threads: Number of worker threads; 1 runs inline.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    workers = min(threads, len(items))
    logger.debug("Dispatching %d blocks to %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="PathBlock") as pool:
        return list(pool.map(fn, items))
