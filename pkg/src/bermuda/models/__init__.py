# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Process model factory and registry.

Maps model kinds to their implementations and exposes the three
operations the engine needs: initialise paths, step them, and draw
independent one-step successors.
"""

import numpy as np

from ..process_model import ModelSpec, ProcessModel, StateBlock, TimeGrid
from .gbm import AsianGBM, MultiGBM, WindowGBM
from .svsi import SvsiModel

# Registry of available models
MODEL_REGISTRY: dict[str, type[ProcessModel]] = {
    "multi_gbm": MultiGBM,
    "asian_gbm": AsianGBM,
    "window_gbm": WindowGBM,
    "svsi": SvsiModel,
}


def create_model(spec: ModelSpec) -> ProcessModel:
    """
    Factory function to create a process model from its spec.

    Raises:
        ValueError: If spec.kind is not registered
    """
    model_class = MODEL_REGISTRY.get(spec.kind)
    if not model_class:
        available = ", ".join(MODEL_REGISTRY.keys())
        raise ValueError(f"Unknown model kind: {spec.kind}. Available kinds: {available}")
    return model_class(spec)  # type: ignore[call-arg]


def init_paths(model: ProcessModel, grid: TimeGrid, n: int) -> StateBlock:
    """n paths at grid index 0."""
    return model.init_paths(grid, n)


def step(
    model: ProcessModel, grid: TimeGrid, block: StateBlock, stream: np.random.Generator
) -> StateBlock:
    """Advance a block by one grid time."""
    return model.step(grid, block, stream)


def substep(
    model: ProcessModel,
    grid: TimeGrid,
    block: StateBlock,
    n_sub: int,
    stream: np.random.Generator,
) -> StateBlock:
    """n_sub independent successors of every row of the block."""
    return model.substep(grid, block, n_sub, stream)


__all__ = [
    "MODEL_REGISTRY",
    "create_model",
    "init_paths",
    "step",
    "substep",
    "MultiGBM",
    "AsianGBM",
    "WindowGBM",
    "SvsiModel",
]
