# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Shared fixtures and configuration for all tests.
"""

import numpy as np
import pytest

from bermuda import debug_log
from bermuda.models import create_model
from bermuda.process_model import ModelSpec, TimeGrid
from bermuda.profiling import disable_profiling, reset_profiling
from bermuda.rewards import RewardSpec
from bermuda.streams import StreamFactory

from tests.helpers import random_coercion

# Parameters of the one-asset put most tests price
SPOT = 100.0
STRIKE = 100.0
RATE = 0.06
VOL = 0.2
EXPIRY = 0.5


@pytest.fixture(autouse=True)
def _quiet_side_channels():
    """Keep debug logs and the profiler off between tests."""
    debug_log.disable()
    disable_profiling()
    reset_profiling()
    yield
    debug_log.disable()
    disable_profiling()
    reset_profiling()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def streams() -> StreamFactory:
    return StreamFactory(seed=20240101)


@pytest.fixture
def small_grid() -> TimeGrid:
    """Five exercise dates over half a year."""
    return TimeGrid.uniform(EXPIRY, 5)


@pytest.fixture
def put_model_spec() -> ModelSpec:
    return ModelSpec.build("multi_gbm", 1, SPOT, RATE, vol=VOL)


@pytest.fixture
def put_model(put_model_spec):
    return create_model(put_model_spec)


@pytest.fixture
def put_spec() -> RewardSpec:
    return RewardSpec("min_put", strike=STRIKE)


@pytest.fixture
def make_chain(rng):
    """Factory for random valid coerced chains."""

    def make(n_times: int = 4, n_bins: int = 3, lockout: float = 0.0):
        return random_coercion(rng, n_times, n_bins, lockout)

    return make
