# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Hand-built chains and configs shared by several test packages.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from bermuda.coercion import Coercion
from bermuda.process_model import TimeGrid


def random_coercion(
    rng: np.random.Generator,
    n_times: int = 4,
    n_bins: int = 3,
    lockout: float = 0.0,
    n_block: int = 1,
) -> Coercion:
    """
    A valid coerced chain with random sorted values and random transitions.

    Edges sit halfway between neighbouring values, so every bin value
    falls inside its own bin.
    """
    grid = TimeGrid.uniform(1.0, n_times, lockout)
    values = np.sort(rng.normal(size=(n_times, n_bins)), axis=1)
    # Keep neighbours apart so edges separate them cleanly
    values = values + np.arange(n_bins) * 1e-3
    edges = 0.5 * (values[:, 1:] + values[:, :-1])
    trans = rng.dirichlet(np.ones(n_bins), size=(n_times - 1, n_bins))
    trans = trans / trans.sum(axis=2, keepdims=True)
    return Coercion(
        edges=edges, values=values, trans=trans, grid=grid, n_bins=n_bins, n_block=n_block
    )


def small_config(**overrides: Any) -> dict[str, Any]:
    """A one-asset put config that prices in well under a second."""
    cfg: dict[str, Any] = {
        "label": "small-put",
        "example": "min_put",
        "varied": {"d": 1},
        "reference_price": None,
        "model": {"kind": "multi_gbm", "dim": 1, "spot": 100.0, "rate": 0.06, "vol": 0.2},
        "reward": {"payoff": "min_put", "strike": 100.0},
        "grid": {"expiry": 0.5, "n_times": 5, "lockout": 0.0},
        "sizes": {"n_bins": 10, "n_block": 20, "n_primal": 500, "n_dual": 50, "n_sub": 5},
        "seed": 7,
        "scale": 1.0,
        "threads": 1,
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key] = {**cfg[key], **value}
        else:
            cfg[key] = value
    return cfg
