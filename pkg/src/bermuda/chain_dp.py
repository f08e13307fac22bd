# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Backward induction on the coerced chain.

Produces the value array V and the stopping array S. Where exercise is
locked out the value is the continuation value and S is false; at expiry
V equals the bin values and S is true. A bin stops when its value is at
least the continuation value, so ties stop.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import debug_log
from .coercion import Coercion, locate_bin
from .process_model import BoolArray, FloatArray, TimeGrid
from .profiling import profile_function

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ValueStoppingTable:
    """Chain value V[i, k] and stop decision S[i, k] per grid time and bin."""

    value: FloatArray
    stop: BoolArray
    grid: TimeGrid

    def stopping_intervals(self, c: Coercion, t_index: int) -> list[tuple[float, float]]:
        """
        The stopping region at one time as a union of reward intervals.

        Runs of consecutive stopping bins merge; the outer bins extend to
        -inf and +inf.
        """
        stop = self.stop[t_index]
        edges = c.edges[t_index]
        lower = np.concatenate(([-np.inf], edges))
        upper = np.concatenate((edges, [np.inf]))
        intervals: list[tuple[float, float]] = []
        k = 0
        while k < stop.size:
            if not stop[k]:
                k += 1
                continue
            start = k
            while k + 1 < stop.size and stop[k + 1]:
                k += 1
            intervals.append((float(lower[start]), float(upper[k])))
            k += 1
        return intervals


@profile_function("chain_dp.solve")
def solve_chain(c: Coercion, grid: TimeGrid | None = None) -> ValueStoppingTable:
    """
    Solve the optimal stopping problem of the coerced chain.

    Args:
        c: The coerced chain.
        grid: Exercise grid; defaults to the chain's own grid.
    """
    grid = grid if grid is not None else c.grid
    if grid.n_times != c.n_times:
        raise ValueError(f"grid has {grid.n_times} times, chain has {c.n_times}")

    n_t = grid.n_times
    value = np.empty((n_t, c.n_bins))
    stop = np.zeros((n_t, c.n_bins), dtype=bool)
    value[-1] = c.values[-1]
    stop[-1] = True

    for i in range(n_t - 2, -1, -1):
        cont = c.trans[i] @ value[i + 1]
        eta = c.values[i]
        if grid.exercise_mask[i]:
            stop[i] = eta >= cont
            value[i] = np.maximum(eta, cont)
        else:
            value[i] = cont

    table = ValueStoppingTable(value=value, stop=stop, grid=grid)
    if debug_log.is_enabled():
        for i in range(n_t):
            debug_log.log_stopping_region(i, table.stopping_intervals(c, i))
    logger.info("Chain value at t=0: %.6f .. %.6f", value[0].min(), value[0].max())
    return table


def value_at(
    table: ValueStoppingTable, c: Coercion, t_index: int, yval: float | FloatArray
) -> float | FloatArray:
    """V(t, y): the chain value of the bin containing reward y."""
    found = table.value[t_index][locate_bin(c, t_index, yval)]
    if np.ndim(found) == 0:
        return float(found)
    return found


def stop_at(
    table: ValueStoppingTable, c: Coercion, t_index: int, yval: float | FloatArray
) -> bool | BoolArray:
    """S(t, y): whether the rule stops at reward y."""
    found = table.stop[t_index][locate_bin(c, t_index, yval)]
    if np.ndim(found) == 0:
        return bool(found)
    return found
