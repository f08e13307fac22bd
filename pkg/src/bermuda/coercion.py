# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Markovian coercion of the reward process.

One forward pass of N_sim = 2 * N_block * N_bins training paths fixes, at
every grid time, N_bins bins holding exactly 2 * N_block training paths
each. The bin value is the middle order statistic of the bin and the upper
edge is its largest member. Counting how training paths move between bins
gives the transition array P of the approximating chain.

A time where every training path shares one reward (the deterministic start,
or an average fixed by earlier prices) is a point mass: all paths sit in
bin 0 and the transition rows out of it are the pooled law of the next time.

Only the current state block is kept while stepping forward.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from . import debug_log
from .models import create_model
from .process_model import FloatArray, ModelSpec, ProcessModel, StateBlock, TimeGrid
from .profiling import profile_section
from .rewards import RewardSpec, check_compatible, reward
from .streams import PATH_BLOCK, Purpose, StreamFactory, block_sizes
from .workers import map_blocks

logger = logging.getLogger(__name__)

IntArray = npt.NDArray[np.intp]

ROW_SUM_TOL: float = 1e-12


class DegenerateSampleError(ValueError):
    """Raised when tied rewards make bins impossible to separate."""


@dataclass(frozen=True, eq=False)
class Coercion:
    """
    The coerced chain: bin edges, bin values and transitions per grid time.

    Attributes:
        edges: N_T x (N_bins - 1) upper bin edges; bins are right-closed.
        values: N_T x N_bins bin values (the chain's states).
        trans: (N_T - 1) x N_bins x N_bins row-stochastic transitions.
        grid: The time grid the chain lives on.
        n_bins: Bins per grid time.
        n_block: Half the training paths per bin.
    """

    edges: FloatArray
    values: FloatArray
    trans: FloatArray
    grid: TimeGrid
    n_bins: int
    n_block: int

    @property
    def n_sim(self) -> int:
        """Training paths used to build the chain."""
        return 2 * self.n_block * self.n_bins

    @property
    def n_times(self) -> int:
        return self.grid.n_times

    def is_point_mass(self, t_index: int) -> bool:
        """True where the whole training sample shared one reward."""
        return bool(np.all(self.values[t_index] == self.values[t_index, 0]))

    def check(self) -> None:
        """
        Verify shapes, interleaving and row-stochasticity.

        Raises:
            DegenerateSampleError: Edges and values fail to interleave.
            ValueError: Shapes or transitions are invalid.
        """
        n_t, n_b = self.grid.n_times, self.n_bins
        if n_b < 2:
            raise ValueError(f"n_bins must be at least 2, got {n_b}")
        if self.edges.shape != (n_t, n_b - 1):
            raise ValueError(f"edges must be {n_t}x{n_b - 1}, got {self.edges.shape}")
        if self.values.shape != (n_t, n_b):
            raise ValueError(f"values must be {n_t}x{n_b}, got {self.values.shape}")
        if self.trans.shape != (n_t - 1, n_b, n_b):
            raise ValueError(f"trans must be {n_t - 1}x{n_b}x{n_b}, got {self.trans.shape}")

        for t in range(n_t):
            if self.is_point_mass(t):
                continue
            if not _interleaves(self.edges[t], self.values[t]):
                raise DegenerateSampleError(f"bin edges and values do not interleave at t={t}")

        if np.any(self.trans < 0.0):
            raise ValueError("transition probabilities must be non-negative")
        row_sums = self.trans.sum(axis=2)
        if np.max(np.abs(row_sums - 1.0), initial=0.0) > ROW_SUM_TOL:
            raise ValueError("transition rows must sum to 1")


def _interleaves(edges: FloatArray, values: FloatArray) -> bool:
    # values[0] < edges[0] < values[1] < ... < edges[-1] < values[-1]
    merged = np.empty(values.size + edges.size)
    merged[0::2] = values
    merged[1::2] = edges
    return bool(np.all(np.diff(merged) > 0.0))


def rank_bins(sample: FloatArray, n_bins: int) -> tuple[IntArray, FloatArray, FloatArray]:
    """
    Assign each sample to a bin by rank and read off edges and values.

    With 2 * N_block samples per bin, edge k is order statistic 2k * N_block
    and value k is order statistic (2k - 1) * N_block (1-indexed).

    Returns:
        (bins, edges, values)
    """
    n_sim = sample.size
    per_bin = n_sim // n_bins
    half = per_bin // 2
    order = np.argsort(sample, kind="stable")
    ranked = sample[order]
    bins = np.empty(n_sim, dtype=np.intp)
    bins[order] = np.arange(n_sim) // per_bin
    edges = ranked[per_bin * np.arange(1, n_bins) - 1]
    values = ranked[per_bin * np.arange(n_bins) + half - 1]
    return bins, edges, values


def locate_bin(c: Coercion, t_index: int, yval: float | FloatArray) -> int | IntArray:
    """
    Bin index k with yval in (edge k-1, edge k]; binary search.

    Accepts a scalar or an array of rewards.
    """
    found = np.searchsorted(c.edges[t_index], yval, side="left")
    if np.ndim(found) == 0:
        return int(found)
    return found.astype(np.intp)


def coerce_value(c: Coercion, t_index: int, yval: float | FloatArray) -> float | FloatArray:
    """The coerced reward Y_t: the value of the bin containing yval."""
    found = c.values[t_index][locate_bin(c, t_index, yval)]
    if np.ndim(found) == 0:
        return float(found)
    return found


def _count_transitions(prev: IntArray, nxt: IntArray, n_bins: int, per_bin: int) -> FloatArray:
    counts = np.bincount(prev * n_bins + nxt, minlength=n_bins * n_bins)
    return counts.reshape(n_bins, n_bins) / per_bin


def build_coercion(
    model: ProcessModel | ModelSpec,
    spec: RewardSpec,
    grid: TimeGrid,
    n_bins: int,
    n_block: int,
    streams: StreamFactory,
    threads: int = 1,
) -> Coercion:
    """
    Simulate the training sample once and build the coerced chain.

    Args:
        model: The process (or its spec) to coerce.
        spec: Reward whose tie-broken values are binned.
        grid: Exercise time grid.
        n_bins: Bins per grid time (at least 2).
        n_block: Half the paths per bin (at least 1).
        streams: Random streams; draws use the BUILD purpose.
        threads: Worker threads for path simulation.

    Raises:
        DegenerateSampleError: Tied rewards straddle a bin edge, or the
            reward sample is constant at every grid time.
    """
    if n_bins < 2:
        raise ValueError(f"n_bins must be at least 2, got {n_bins}")
    if n_block < 1:
        raise ValueError(f"n_block must be at least 1, got {n_block}")
    if isinstance(model, ModelSpec):
        model = create_model(model)
    check_compatible(spec, model)

    per_bin = 2 * n_block
    n_sim = per_bin * n_bins
    sizes = block_sizes(n_sim, PATH_BLOCK)
    n_t = grid.n_times
    logger.info(
        "Building coercion: %d bins x %d paths per bin = %d paths over %d times",
        n_bins, per_bin, n_sim, n_t,
    )

    edges = np.empty((n_t, n_bins - 1))
    values = np.empty((n_t, n_bins))
    trans = np.empty((n_t - 1, n_bins, n_bins))

    with profile_section("coercion.init"):
        blocks: list[StateBlock] = [model.init_paths(grid, size) for size in sizes]
    prev_bins: IntArray | None = None
    prev_point_mass = False
    point_masses = 0

    for t in range(n_t):
        if t > 0:
            def advance(b: int, _t: int = t) -> StateBlock:
                rng = streams.generator(Purpose.BUILD, b, _t - 1)
                return model.step(grid, blocks[b], rng)

            with profile_section("coercion.step"):
                blocks = map_blocks(advance, range(len(blocks)), threads)

        with profile_section("coercion.bin"):
            sample = np.concatenate([reward(spec, model, grid, blk) for blk in blocks])
            if not np.all(np.isfinite(sample)):
                raise DegenerateSampleError(f"non-finite rewards at t={t}")

            point_mass = bool(np.ptp(sample) == 0.0)
            if point_mass:
                # Every path shares one reward: all sit in bin 0
                edges[t] = sample[0]
                values[t] = sample[0]
                bins = np.zeros(n_sim, dtype=np.intp)
                point_masses += 1
            else:
                bins, edges[t], values[t] = rank_bins(sample, n_bins)
                if not _interleaves(edges[t], values[t]):
                    raise DegenerateSampleError(
                        f"tied rewards at t={t} straddle a bin edge; "
                        "enable the tie-break or use fewer bins"
                    )
                if np.any(locate_bin_array(edges[t], sample) != bins):
                    raise DegenerateSampleError(
                        f"tied rewards at t={t} sit on a bin edge; bin occupancy is ambiguous"
                    )

            if prev_bins is not None:
                if prev_point_mass:
                    pooled = np.bincount(bins, minlength=n_bins) / n_sim
                    trans[t - 1] = np.broadcast_to(pooled, (n_bins, n_bins))
                else:
                    trans[t - 1] = _count_transitions(prev_bins, bins, n_bins, per_bin)
            prev_bins = bins
            prev_point_mass = point_mass

        occupancy = np.bincount(bins, minlength=n_bins)
        debug_log.log_bin_layout(t, edges[t], values[t], occupancy)
        logger.debug("t=%d: values %.6g .. %.6g", t, values[t, 0], values[t, -1])

    if point_masses == n_t:
        raise DegenerateSampleError(
            "the reward sample is constant at every grid time; the model has no randomness"
        )

    coercion = Coercion(
        edges=edges, values=values, trans=trans, grid=grid, n_bins=n_bins, n_block=n_block
    )
    coercion.check()
    return coercion


def locate_bin_array(edges: FloatArray, sample: FloatArray) -> IntArray:
    """Vectorised right-closed bin lookup against one row of edges."""
    return np.searchsorted(edges, sample, side="left").astype(np.intp)
