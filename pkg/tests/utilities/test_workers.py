# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""Tests for path-block dispatch."""

import threading
import time

import pytest

from bermuda.streams import PATH_BLOCK, block_sizes
from bermuda.workers import map_blocks, resolve_threads


def test_results_come_back_in_item_order():
    """Results keep the order of the items."""
    def slow_for_early(i: int) -> int:
        # Early items finish last
        time.sleep(0.01 * (5 - i))
        return i * i

    assert map_blocks(slow_for_early, range(6), threads=4) == [0, 1, 4, 9, 16, 25]


def test_single_thread_runs_inline():
    """One thread runs in the calling thread."""
    seen: list[str] = []
    map_blocks(lambda _: seen.append(threading.current_thread().name), [0, 1], threads=1)
    assert set(seen) == {threading.current_thread().name}


def test_resolve_threads():
    """Positive counts are kept; 0 and None mean one worker per CPU."""
    assert resolve_threads(3) == 3
    assert resolve_threads(0) >= 1
    assert resolve_threads(None) >= 1


def test_block_sizes():
    """Paths split into full blocks and one remainder."""
    assert block_sizes(10000) == [PATH_BLOCK, PATH_BLOCK, 10000 - 2 * PATH_BLOCK]
    assert block_sizes(PATH_BLOCK) == [PATH_BLOCK]
    assert block_sizes(5, block=2) == [2, 2, 1]
    with pytest.raises(ValueError):
        block_sizes(0)
