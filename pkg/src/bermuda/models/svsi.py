# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Stochastic volatility and stochastic interest model.

Each asset's volatility is sigma_bar * exp(xi_i) with xi_i an OU process;
the short rate is r_bar * exp(z) with z an OU process (Black-Karasinski).
All three families of noise share a market Brownian motion W^M.

Volatility and rate are frozen at the start of each interval inside the
price update, while xi and z take exact OU transitions.
"""

from __future__ import annotations

import math

import numpy as np

from ..process_model import (
    ModelError,
    ModelSpec,
    ProcessModel,
    StateBlock,
    SvsiParams,
    TimeGrid,
    correlation_complement,
)


def ou_transition(beta: float, sigma: float, dt: float) -> tuple[float, float]:
    """Decay factor and conditional standard deviation of an OU step."""
    decay = math.exp(-beta * dt)
    std = sigma * math.sqrt(-math.expm1(-2.0 * beta * dt) / (2.0 * beta))
    return decay, std


class SvsiModel(ProcessModel):
    """d assets driven by a market factor, with stochastic vol and rate."""

    kind = "svsi"

    def __init__(self, spec: ModelSpec) -> None:
        if spec.svsi is None:
            raise ModelError("svsi model needs svsi parameters")
        self.spec = spec
        self.params: SvsiParams = spec.svsi

    @property
    def dim(self) -> int:
        return self.spec.dim

    def init_paths(self, grid: TimeGrid, n: int) -> StateBlock:
        if n < 1:
            raise ModelError(f"need at least one path, got {n}")
        p = self.params
        core = np.tile(np.log(self.spec.spot), (n, 1))
        block = StateBlock(core=core, log_discount=np.zeros(n), t_index=0)
        block.aux["xi"] = np.full((n, self.spec.dim), math.log(p.sigma0 / p.sigma_bar))
        block.aux["z"] = np.full(n, math.log(p.r0 / p.r_bar))
        return block

    def volatility(self, block: StateBlock) -> np.ndarray:
        """Current per-asset volatilities sigma_t."""
        return self.params.sigma_bar * np.exp(block.aux["xi"])

    def short_rate(self, block: StateBlock) -> np.ndarray:
        """Current short rate r_t."""
        return self.params.r_bar * np.exp(block.aux["z"])

    def step(self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator) -> StateBlock:
        self._check_steppable(grid, block)
        p = self.params
        n, d = block.n, self.spec.dim
        dt = grid.dt(block.t_index)
        sqdt = math.sqrt(dt)

        market = rng.standard_normal(n)
        own = rng.standard_normal((n, d))
        vol_noise = rng.standard_normal((n, d))
        rate_noise = rng.standard_normal(n)

        vol = self.volatility(block)
        rate = self.short_rate(block)

        # Discounted log price: the r dt terms cancel
        price_noise = p.rho_s * market[:, None] + correlation_complement(p.rho_s) * own
        core = block.core + vol * price_noise * sqdt - 0.5 * vol * vol * dt

        xi_decay, xi_std = ou_transition(p.beta_xi, p.sigma_xi, dt)
        xi_shock = p.rho_xi * market[:, None] + correlation_complement(p.rho_xi) * vol_noise
        xi = block.aux["xi"] * xi_decay + xi_std * xi_shock

        z_decay, z_std = ou_transition(p.beta_r, p.sigma_r, dt)
        z_shock = p.rho_r * market + correlation_complement(p.rho_r) * rate_noise
        z = block.aux["z"] * z_decay + z_std * z_shock

        return StateBlock(
            core=core,
            log_discount=block.log_discount + rate * dt,
            t_index=block.t_index + 1,
            aux={"xi": xi, "z": z},
        )
