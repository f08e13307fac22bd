# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Reference prices for single-asset options.

Black-Scholes closed forms, a Cox-Ross-Rubinstein tree with exercise
restricted to a given set of dates, and Gauss-Hermite quadrature of a
one-step GBM expectation. Tests use these as oracles.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.stats import norm


def _d1_d2(
    spot: float, strike: float, rate: float, vol: float, expiry: float, dividend: float
) -> tuple[float, float]:
    sd = vol * math.sqrt(expiry)
    d1 = (math.log(spot / strike) + (rate - dividend + 0.5 * vol * vol) * expiry) / sd
    return d1, d1 - sd


def bs_call(
    spot: float, strike: float, rate: float, vol: float, expiry: float, dividend: float = 0.0
) -> float:
    """Black-Scholes European call."""
    if vol <= 0.0 or expiry <= 0.0:
        fwd = spot * math.exp((rate - dividend) * expiry)
        return math.exp(-rate * expiry) * max(fwd - strike, 0.0)
    d1, d2 = _d1_d2(spot, strike, rate, vol, expiry, dividend)
    return float(
        spot * math.exp(-dividend * expiry) * norm.cdf(d1)
        - strike * math.exp(-rate * expiry) * norm.cdf(d2)
    )


def bs_put(
    spot: float, strike: float, rate: float, vol: float, expiry: float, dividend: float = 0.0
) -> float:
    """Black-Scholes European put."""
    if vol <= 0.0 or expiry <= 0.0:
        fwd = spot * math.exp((rate - dividend) * expiry)
        return math.exp(-rate * expiry) * max(strike - fwd, 0.0)
    d1, d2 = _d1_d2(spot, strike, rate, vol, expiry, dividend)
    return float(
        strike * math.exp(-rate * expiry) * norm.cdf(-d2)
        - spot * math.exp(-dividend * expiry) * norm.cdf(-d1)
    )


def crr_bermudan_put(
    spot: float,
    strike: float,
    rate: float,
    vol: float,
    expiry: float,
    exercise_times: Sequence[float],
    steps: int = 5000,
    dividend: float = 0.0,
) -> float:
    """
    CRR binomial put exercisable only at the given times.

    Each exercise time is snapped to the nearest tree step.

    Raises:
        ValueError: The risk-neutral up probability falls outside (0, 1).
    """
    dt = expiry / steps
    up = math.exp(vol * math.sqrt(dt))
    down = 1.0 / up
    disc = math.exp(-rate * dt)
    q = (math.exp((rate - dividend) * dt) - down) / (up - down)
    if not 0.0 < q < 1.0:
        raise ValueError("Risk-neutral probability q must lie in (0,1); check inputs.")

    exercise_steps = {int(round(t / dt)) for t in exercise_times}

    j = np.arange(steps + 1)
    value = np.maximum(strike - spot * up ** (steps - 2 * j), 0.0)
    for i in range(steps - 1, -1, -1):
        value = disc * (q * value[:-1] + (1.0 - q) * value[1:])
        if i in exercise_steps:
            k = np.arange(i + 1)
            value = np.maximum(value, strike - spot * up ** (i - 2 * k))
    return float(value[0])


def gbm_one_step_expectation(
    fn: Callable[[np.ndarray], np.ndarray],
    spot: float,
    rate: float,
    vol: float,
    dt: float,
    dividend: float = 0.0,
    nodes: int = 64,
) -> float:
    """E[fn(S_dt)] for risk-neutral GBM started at spot, by Gauss-Hermite quadrature."""
    z, w = hermegauss(nodes)
    prices = spot * np.exp((rate - dividend - 0.5 * vol * vol) * dt + vol * math.sqrt(dt) * z)
    return float(np.dot(w, fn(prices)) / math.sqrt(2.0 * math.pi))
