# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
A coerced chain simulated as its own Markov process.

The state is the bin index (stored as a float in the single core column),
the reward is the bin value, and transitions follow the coercion's P. The
one-step law is finite, so exact conditional expectations are available.
Used to check the engine against cases where the chain solution is exact.
"""

from __future__ import annotations

import numpy as np

from ..coercion import Coercion
from ..process_model import FloatArray, ProcessModel, StateBlock, TimeGrid


class ChainModel(ProcessModel):
    """Markov chain on bin indices with transition array P."""

    kind = "chain"

    def __init__(self, coercion: Coercion, initial_bin: int = 0) -> None:
        if not 0 <= initial_bin < coercion.n_bins:
            raise ValueError(f"initial bin {initial_bin} outside [0, {coercion.n_bins})")
        self.coercion = coercion
        self.initial_bin = initial_bin
        self._cdf: FloatArray = np.cumsum(coercion.trans, axis=2)

    def init_paths(self, grid: TimeGrid, n: int) -> StateBlock:
        if n < 1:
            raise ValueError(f"need at least one path, got {n}")
        core = np.full((n, 1), float(self.initial_bin))
        return StateBlock(core=core, log_discount=np.zeros(n), t_index=0)

    @staticmethod
    def bins(block: StateBlock) -> np.ndarray:
        """Current bin index of every path."""
        return block.core[:, 0].astype(np.intp)

    def step(self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator) -> StateBlock:
        self._check_steppable(grid, block)
        cdf = self._cdf[block.t_index][self.bins(block)]
        u = rng.random(block.n)
        nxt = np.minimum((cdf < u[:, None]).sum(axis=1), self.coercion.n_bins - 1)
        return StateBlock(
            core=nxt.astype(np.float64)[:, None],
            log_discount=block.log_discount.copy(),
            t_index=block.t_index + 1,
        )

    @property
    def supports_exact(self) -> bool:
        return True

    def exact_successors(self, grid: TimeGrid, block: StateBlock) -> tuple[StateBlock, FloatArray]:
        self._check_steppable(grid, block)
        n_bins = self.coercion.n_bins
        weights = self.coercion.trans[block.t_index][self.bins(block)]
        targets = np.tile(np.arange(n_bins, dtype=np.float64), block.n)
        successors = StateBlock(
            core=targets[:, None],
            log_discount=np.repeat(block.log_discount, n_bins),
            t_index=block.t_index + 1,
        )
        return successors, weights
