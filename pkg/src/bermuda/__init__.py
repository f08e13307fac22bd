# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
bermuda - Bermudan option price bounds by Markovian coercion.

Bins the scalar reward process of a simulated Markov model into a finite
chain, solves the chain by dynamic programming, and turns the solution
into a lower bound (its stopping rule) and an upper bound (its dual
martingale) for the true option price.
"""

__version__ = "0.1.0"

from .bounds import EXACT, BoundEstimate, european_value, lower_bound, upper_bound
from .chain_dp import ValueStoppingTable, solve_chain, stop_at, value_at
from .coercion import Coercion, DegenerateSampleError, build_coercion, coerce_value, locate_bin
from .config import ConfigError, ExperimentConfig, load_config
from .harness import Report, run_experiment, sweep
from .process_model import ModelError, ModelSpec, StateBlock, TimeGrid
from .rewards import RewardError, RewardSpec

__all__ = [
    "EXACT",
    "BoundEstimate",
    "Coercion",
    "ConfigError",
    "DegenerateSampleError",
    "ExperimentConfig",
    "ModelError",
    "ModelSpec",
    "Report",
    "RewardError",
    "RewardSpec",
    "StateBlock",
    "TimeGrid",
    "ValueStoppingTable",
    "build_coercion",
    "coerce_value",
    "european_value",
    "load_config",
    "locate_bin",
    "lower_bound",
    "run_experiment",
    "solve_chain",
    "stop_at",
    "sweep",
    "upper_bound",
    "value_at",
]
