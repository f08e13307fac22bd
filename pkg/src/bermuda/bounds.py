# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Price bounds from a solved coerced chain.

- lower_bound runs the chain's stopping rule on fresh paths of the true
  process; any stopping rule gives a lower bound in expectation.
- upper_bound evaluates the dual: the chain value along each path defines
  martingale increments V(t+1) - E[V(t+1) | X_t], with the conditional
  expectation estimated by a one-step subsimulation (or computed exactly
  when the model enumerates its successors). sup_t (Z_t - M_t) averages
  to an upper bound.
- european_value prices exercise at expiry only, on the true payoff.

All three split their paths into fixed random blocks and gather results in
block order, so estimates depend only on the seed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import debug_log
from .chain_dp import ValueStoppingTable, stop_at, value_at
from .coercion import Coercion
from .models import create_model
from .process_model import FloatArray, ModelSpec, ProcessModel, StateBlock, TimeGrid
from .profiling import profile_function
from .rewards import RewardSpec, check_compatible, payoff, reward
from .streams import PATH_BLOCK, Purpose, StreamFactory, block_sizes
from .workers import map_blocks

logger = logging.getLogger(__name__)

EXACT: Literal["exact"] = "exact"
SubCount = int | Literal["exact"]


@dataclass(frozen=True)
class BoundEstimate:
    """Monte Carlo estimate with its standard error."""

    mean: float
    stderr: float
    n: int

    @classmethod
    def from_samples(cls, samples: FloatArray) -> BoundEstimate:
        """Mean and std/sqrt(n) of a sample (stderr 0 for a single sample)."""
        samples = np.asarray(samples, dtype=np.float64)
        n = int(samples.size)
        if n == 0:
            raise ValueError("cannot estimate from an empty sample")
        mean = float(np.mean(samples))
        stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean=mean, stderr=stderr, n=n)

    def __str__(self) -> str:
        return f"{self.mean:.4f} ({self.stderr:.4f})"


def gap_pct(low: BoundEstimate, high: BoundEstimate) -> float:
    """100 * (high - low) / low."""
    if low.mean == 0.0:
        return math.nan
    return 100.0 * (high.mean - low.mean) / low.mean


def _as_model(model: ProcessModel | ModelSpec) -> ProcessModel:
    return create_model(model) if isinstance(model, ModelSpec) else model


def _check_table(c: Coercion, table: ValueStoppingTable) -> TimeGrid:
    if table.value.shape != (c.n_times, c.n_bins):
        raise ValueError("value table does not match the coercion's shape")
    return c.grid


def _primal_block(
    model: ProcessModel,
    spec: RewardSpec,
    c: Coercion,
    table: ValueStoppingTable,
    streams: StreamFactory,
    b: int,
    size: int,
) -> FloatArray:
    grid = c.grid
    realised = np.zeros(size)
    alive = np.arange(size)
    block = model.init_paths(grid, size)
    for t in range(grid.n_times):
        if t > 0:
            block = model.step(grid, block, streams.generator(Purpose.PRIMAL, b, t - 1))
        if not grid.exercise_mask[t]:
            continue
        stops = np.asarray(stop_at(table, c, t, reward(spec, model, grid, block)), dtype=bool)
        if np.any(stops):
            realised[alive[stops]] = payoff(spec, model, grid, block.select(stops))
            alive = alive[~stops]
            if alive.size == 0:
                break
            block = block.select(~stops)
    return realised


@profile_function("bounds.lower")
def lower_bound(
    model: ProcessModel | ModelSpec,
    spec: RewardSpec,
    c: Coercion,
    table: ValueStoppingTable,
    n_primal: int,
    streams: StreamFactory,
    threads: int = 1,
) -> BoundEstimate:
    """
    Value of the chain's stopping rule on fresh paths of the true process.

    Each path stops at the first permitted time where S(t, reward) holds;
    every path stops at expiry at the latest.
    """
    model = _as_model(model)
    check_compatible(spec, model)
    _check_table(c, table)
    sizes = block_sizes(n_primal, PATH_BLOCK)

    def run(b: int) -> FloatArray:
        return _primal_block(model, spec, c, table, streams, b, sizes[b])

    samples = np.concatenate(map_blocks(run, range(len(sizes)), threads))
    estimate = BoundEstimate.from_samples(samples)
    debug_log.log_bound("lower", estimate.mean, estimate.stderr, estimate.n)
    logger.info("Lower bound %s over %d paths", estimate, n_primal)
    return estimate


@dataclass(frozen=True, eq=False)
class DualSample:
    """
    Per-path output of the dual estimator.

    Attributes:
        sup: sup over permitted times of Z_t - M_t, one entry per path.
        increments: Martingale increments, n_paths x (N_T - 1).
    """

    sup: FloatArray
    increments: FloatArray

    def estimate(self) -> BoundEstimate:
        return BoundEstimate.from_samples(self.sup)

    def increment_summary(self) -> tuple[FloatArray, FloatArray]:
        """Sample mean and standard error of the increment at each step."""
        n = self.increments.shape[0]
        means = self.increments.mean(axis=0)
        if n < 2:
            return means, np.zeros_like(means)
        return means, self.increments.std(axis=0, ddof=1) / math.sqrt(n)


def _expected_next_value(
    model: ProcessModel,
    spec: RewardSpec,
    c: Coercion,
    table: ValueStoppingTable,
    block: StateBlock,
    n_sub: SubCount,
    rng: np.random.Generator | None,
) -> FloatArray:
    grid = c.grid
    t_next = block.t_index + 1
    if n_sub == EXACT:
        successors, weights = model.exact_successors(grid, block)
        values = np.asarray(value_at(table, c, t_next, reward(spec, model, grid, successors)))
        return (weights * values.reshape(block.n, -1)).sum(axis=1)

    if rng is None:
        raise ValueError("subsimulation needs a random stream")
    successors = model.substep(grid, block, int(n_sub), rng)
    values = np.asarray(value_at(table, c, t_next, reward(spec, model, grid, successors)))
    return values.reshape(block.n, int(n_sub)).mean(axis=1)


def _dual_block(
    model: ProcessModel,
    spec: RewardSpec,
    c: Coercion,
    table: ValueStoppingTable,
    n_sub: SubCount,
    streams: StreamFactory,
    b: int,
    size: int,
) -> tuple[FloatArray, FloatArray]:
    grid = c.grid
    n_t = grid.n_times
    block = model.init_paths(grid, size)
    martingale = np.zeros(size)
    increments = np.empty((size, n_t - 1))
    if grid.exercise_mask[0]:
        best = payoff(spec, model, grid, block).astype(np.float64)
    else:
        best = np.full(size, -np.inf)

    for i in range(n_t - 1):
        sub_rng = None if n_sub == EXACT else streams.generator(Purpose.SUBSIM, b, i)
        expected = _expected_next_value(model, spec, c, table, block, n_sub, sub_rng)
        block = model.step(grid, block, streams.generator(Purpose.DUAL, b, i))
        realised = np.asarray(value_at(table, c, i + 1, reward(spec, model, grid, block)))
        increments[:, i] = realised - expected
        martingale += increments[:, i]
        if grid.exercise_mask[i + 1]:
            np.maximum(best, payoff(spec, model, grid, block) - martingale, out=best)
    return best, increments


def dual_paths(
    model: ProcessModel | ModelSpec,
    spec: RewardSpec,
    c: Coercion,
    table: ValueStoppingTable,
    n_dual: int,
    n_sub: SubCount,
    streams: StreamFactory,
    threads: int = 1,
) -> DualSample:
    """
    Simulate dual paths and return per-path sups and martingale increments.

    Args:
        n_sub: Successors per step, or EXACT to use the model's exact
            one-step law (only for models with supports_exact).
    """
    model = _as_model(model)
    check_compatible(spec, model)
    _check_table(c, table)
    if n_sub == EXACT:
        if not model.supports_exact:
            raise ValueError(f"{model.kind} model has no exact successor law")
    elif int(n_sub) < 1:
        raise ValueError(f"n_sub must be at least 1, got {n_sub}")
    sizes = block_sizes(n_dual, PATH_BLOCK)

    def run(b: int) -> tuple[FloatArray, FloatArray]:
        return _dual_block(model, spec, c, table, n_sub, streams, b, sizes[b])

    results = map_blocks(run, range(len(sizes)), threads)
    return DualSample(
        sup=np.concatenate([r[0] for r in results]),
        increments=np.concatenate([r[1] for r in results]),
    )


@profile_function("bounds.upper")
def upper_bound(
    model: ProcessModel | ModelSpec,
    spec: RewardSpec,
    c: Coercion,
    table: ValueStoppingTable,
    n_dual: int,
    n_sub: SubCount,
    streams: StreamFactory,
    threads: int = 1,
) -> BoundEstimate:
    """Dual upper bound E[sup_t (Z_t - M_t)] with the chain-value martingale."""
    sample = dual_paths(model, spec, c, table, n_dual, n_sub, streams, threads)
    estimate = sample.estimate()
    if logger.isEnabledFor(logging.DEBUG):
        means, errs = sample.increment_summary()
        worst = float(np.max(np.abs(means) / np.where(errs > 0, errs, np.inf), initial=0.0))
        logger.debug("Largest martingale increment z-score: %.2f", worst)
    debug_log.log_bound("upper", estimate.mean, estimate.stderr, estimate.n)
    logger.info("Upper bound %s over %d paths, n_sub=%s", estimate, n_dual, n_sub)
    return estimate


@profile_function("bounds.european")
def european_value(
    model: ProcessModel | ModelSpec,
    spec: RewardSpec,
    grid: TimeGrid,
    n_paths: int,
    streams: StreamFactory,
    threads: int = 1,
) -> BoundEstimate:
    """Mean discounted payoff at expiry on actual (unbinned) values."""
    model = _as_model(model)
    check_compatible(spec, model)
    sizes = block_sizes(n_paths, PATH_BLOCK)

    def run(b: int) -> FloatArray:
        block = model.init_paths(grid, sizes[b])
        for t in range(grid.n_times - 1):
            block = model.step(grid, block, streams.generator(Purpose.EUROPEAN, b, t))
        return payoff(spec, model, grid, block)

    samples = np.concatenate(map_blocks(run, range(len(sizes)), threads))
    estimate = BoundEstimate.from_samples(samples)
    debug_log.log_bound("european", estimate.mean, estimate.stderr, estimate.n)
    logger.info("European value %s over %d paths", estimate, n_paths)
    return estimate
