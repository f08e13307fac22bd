# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Geometric Brownian motion models.

MultiGBM is the correlated d-asset model with dividends. AsianGBM carries
the running average needed by Asian payoffs, WindowGBM the last a+1
recorded prices needed by fixed-window payoffs. All three take exact
log-Euler steps, which is exact for constant coefficients.
"""

from __future__ import annotations

import logging

import numpy as np

from ..process_model import FloatArray, ModelSpec, ProcessModel, StateBlock, TimeGrid

logger = logging.getLogger(__name__)


class MultiGBM(ProcessModel):
    """Correlated log-Brownian assets with constant rate and dividend yield."""

    kind = "multi_gbm"

    def __init__(self, spec: ModelSpec) -> None:
        self.spec = spec
        self._factor: FloatArray = spec.factor
        # Drift of the discounted log price x = log S - r t
        self._x_drift: FloatArray = spec.log_drift - spec.rate

    @property
    def dim(self) -> int:
        return self.spec.dim

    def init_paths(self, grid: TimeGrid, n: int) -> StateBlock:
        if n < 1:
            raise ValueError(f"need at least one path, got {n}")
        core = np.tile(np.log(self.spec.spot), (n, 1))
        block = StateBlock(core=core, log_discount=np.zeros(n), t_index=0)
        self._init_aux(block)
        return block

    def _init_aux(self, block: StateBlock) -> None:
        """Hook for subclasses that carry auxiliary state."""

    def _advance_core(
        self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator
    ) -> StateBlock:
        dt = grid.dt(block.t_index)
        normals = rng.standard_normal((block.n, self.spec.dim))
        core = block.core + normals @ self._factor.T * np.sqrt(dt) + self._x_drift * dt
        return StateBlock(
            core=core,
            log_discount=block.log_discount + self.spec.rate * dt,
            t_index=block.t_index + 1,
            aux=dict(block.aux),
        )

    def step(self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator) -> StateBlock:
        self._check_steppable(grid, block)
        return self._advance_core(grid, block, rng)


class AsianGBM(MultiGBM):
    """
    Single asset plus its running average A_t.

    The price is held at S0 over [-delta, 0]; A is then updated with a
    left-endpoint Riemann sum over each grid interval.
    """

    kind = "asian_gbm"

    def _init_aux(self, block: StateBlock) -> None:
        average0 = self.spec.average0 if self.spec.average0 is not None else float(self.spec.spot[0])
        block.aux["average"] = np.full(block.n, average0)
        block.aux["mass"] = np.full(block.n, self.spec.average_window)

    def step(self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator) -> StateBlock:
        self._check_steppable(grid, block)
        dt = grid.dt(block.t_index)
        price = block.prices()[:, 0]
        mass = block.aux["mass"]
        new = self._advance_core(grid, block, rng)
        new.aux["average"] = (block.aux["average"] * mass + price * dt) / (mass + dt)
        new.aux["mass"] = mass + dt
        return new


class WindowGBM(MultiGBM):
    """
    Single asset plus its last a+1 recorded prices.

    The window is stored oldest-first with the newest price in the last
    column; slots before the first recorded price hold NaN.
    """

    kind = "window_gbm"

    def _init_aux(self, block: StateBlock) -> None:
        lags = int(self.spec.window or 1)
        window = np.full((block.n, lags + 1), np.nan)
        window[:, -1] = self.spec.spot[0]
        block.aux["window"] = window

    def step(self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator) -> StateBlock:
        self._check_steppable(grid, block)
        new = self._advance_core(grid, block, rng)
        window = np.empty_like(block.aux["window"])
        window[:, :-1] = block.aux["window"][:, 1:]
        window[:, -1] = new.prices()[:, 0]
        new.aux["window"] = window
        return new
