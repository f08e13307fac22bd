# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Stopping rewards g(t, X_t) for every supported payoff.

Each payoff gives two views of the same quantity:

- `payoff`: the true discounted exercise value, used by the price bounds;
- `reward`: the tie-broken version, used to place states in bins. Put-like
  payoffs max{0, u} become max{eps * u, u}, so states that are out of the
  money still carry distinct values. Window payoffs, whose laws have atoms,
  get a small multiple of the discounted window mean added instead.

Discounting lives inside g. Under the stock numeraire both views are
divided by psi(t, X_t) = exp(x_t + q t) / S0.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import ClassVar

import numpy as np

from .process_model import FloatArray, ModelSpec, ProcessModel, StateBlock, TimeGrid

logger = logging.getLogger(__name__)

DEFAULT_EPSILON: float = 1e-6


class RewardError(ValueError):
    """Raised for invalid reward specs or payoff/model mismatches."""


@dataclass(frozen=True)
class RewardSpec:
    """A payoff, its strike, the tie-break size and the numeraire."""

    payoff_id: str
    strike: float | None = None
    epsilon: float = DEFAULT_EPSILON
    numeraire: str = "bank"
    tie_break: bool = True

    def __post_init__(self) -> None:
        payoff = PAYOFF_REGISTRY.get(self.payoff_id)
        if payoff is None:
            available = ", ".join(PAYOFF_REGISTRY.keys())
            raise RewardError(f"Unknown payoff: {self.payoff_id}. Available payoffs: {available}")
        if not 0.0 < self.epsilon < 1e-3:
            raise RewardError(f"epsilon must lie in (0, 1e-3), got {self.epsilon}")
        if payoff.needs_strike and (self.strike is None or self.strike <= 0.0):
            raise RewardError(f"{self.payoff_id} needs a positive strike")
        if self.numeraire not in ("bank", "stock"):
            raise RewardError(f"numeraire must be 'bank' or 'stock', got {self.numeraire}")


def _discount(block: StateBlock) -> FloatArray:
    return np.exp(-block.log_discount)


class Payoff(ABC):
    """A discounted payoff on a state block."""

    payoff_id: ClassVar[str]
    model_kinds: ClassVar[frozenset[str]]
    needs_strike: ClassVar[bool] = True

    @abstractmethod
    def signed(self, spec: RewardSpec, model: ProcessModel, block: StateBlock) -> FloatArray:
        """Discounted moneyness u; the payoff is max(u, 0)."""

    def payoff(self, spec: RewardSpec, model: ProcessModel, block: StateBlock) -> FloatArray:
        return np.maximum(self.signed(spec, model, block), 0.0)

    def reward(self, spec: RewardSpec, model: ProcessModel, block: StateBlock) -> FloatArray:
        u = self.signed(spec, model, block)
        if not spec.tie_break:
            return np.maximum(u, 0.0)
        return np.maximum(spec.epsilon * u, u)


class MinPut(Payoff):
    payoff_id = "min_put"
    model_kinds = frozenset({"multi_gbm", "svsi"})

    def signed(self, spec, model, block):
        return spec.strike * _discount(block) - np.exp(block.core.min(axis=1))


class MaxCall(Payoff):
    payoff_id = "max_call"
    model_kinds = frozenset({"multi_gbm", "svsi"})

    def signed(self, spec, model, block):
        return np.exp(block.core.max(axis=1)) - spec.strike * _discount(block)


class BasketPut(Payoff):
    payoff_id = "basket_put"
    model_kinds = frozenset({"multi_gbm", "svsi"})

    def signed(self, spec, model, block):
        return spec.strike * _discount(block) - np.exp(block.core).mean(axis=1)


class AsianFixedCall(Payoff):
    payoff_id = "asian_fixed_call"
    model_kinds = frozenset({"asian_gbm"})

    def signed(self, spec, model, block):
        return _discount(block) * (block.aux["average"] - spec.strike)


class AsianFloatCall(Payoff):
    payoff_id = "asian_float_call"
    model_kinds = frozenset({"asian_gbm"})
    needs_strike = False

    def signed(self, spec, model, block):
        # e^{-rt} S_t is exp(x_t)
        return _discount(block) * block.aux["average"] - np.exp(block.core[:, 0])


class WindowPayoff(Payoff):
    """Payoffs on the recorded price window; no optional floor."""

    model_kinds = frozenset({"window_gbm"})
    needs_strike = False

    def payoff(self, spec, model, block):
        return self.signed(spec, model, block)

    def reward(self, spec, model, block):
        value = self.signed(spec, model, block)
        if not spec.tie_break:
            return value
        return value + spec.epsilon * _discount(block) * np.nanmean(block.aux["window"], axis=1)


class LookbackWindow(WindowPayoff):
    payoff_id = "lookback_window"

    def signed(self, spec, model, block):
        return _discount(block) * np.nanmax(block.aux["window"], axis=1)


class RangeWindow(WindowPayoff):
    payoff_id = "range_window"

    def signed(self, spec, model, block):
        window = block.aux["window"]
        return _discount(block) * (np.nanmax(window, axis=1) - np.nanmin(window, axis=1))


class ChainValue(Payoff):
    """Reward of a coerced chain simulated as its own process: the bin value."""

    payoff_id = "chain_value"
    model_kinds = frozenset({"chain"})
    needs_strike = False

    def signed(self, spec, model, block):
        values = model.coercion.values[block.t_index]  # type: ignore[attr-defined]
        return values[block.core[:, 0].astype(np.intp)]

    def payoff(self, spec, model, block):
        return self.signed(spec, model, block)

    def reward(self, spec, model, block):
        return self.signed(spec, model, block)


PAYOFF_REGISTRY: dict[str, Payoff] = {
    p.payoff_id: p
    for p in (
        MinPut(),
        MaxCall(),
        BasketPut(),
        AsianFixedCall(),
        AsianFloatCall(),
        LookbackWindow(),
        RangeWindow(),
        ChainValue(),
    )
}


def check_compatible(spec: RewardSpec, model: ProcessModel) -> None:
    """Raise RewardError if the payoff cannot be evaluated on the model's states."""
    payoff = PAYOFF_REGISTRY[spec.payoff_id]
    if model.kind not in payoff.model_kinds:
        raise RewardError(
            f"payoff {spec.payoff_id} needs a model of kind "
            f"{' or '.join(sorted(payoff.model_kinds))}, got {model.kind}"
        )
    model_numeraire = getattr(getattr(model, "spec", None), "numeraire", "bank")
    if model_numeraire != spec.numeraire:
        raise RewardError(
            f"reward numeraire {spec.numeraire} does not match model numeraire "
            f"{model_numeraire}; use apply_numeraire"
        )


def numeraire_weight(
    spec: RewardSpec, model: ProcessModel, grid: TimeGrid, block: StateBlock
) -> FloatArray | None:
    """psi(t, X_t) under the stock numeraire, None under the bank numeraire."""
    if spec.numeraire == "bank":
        return None
    mspec: ModelSpec = model.spec  # type: ignore[attr-defined]
    t = grid.times[block.t_index]
    return np.exp(block.core[:, 0] + mspec.dividend * t) / mspec.spot[0]


def reward(spec: RewardSpec, model: ProcessModel, grid: TimeGrid, block: StateBlock) -> FloatArray:
    """
    Tie-broken reward of every path in the block, in the payoff's numeraire.

    This is the scalar signal the coercion bins.
    """
    value = PAYOFF_REGISTRY[spec.payoff_id].reward(spec, model, block)
    psi = numeraire_weight(spec, model, grid, block)
    return value if psi is None else value / psi


def payoff(spec: RewardSpec, model: ProcessModel, grid: TimeGrid, block: StateBlock) -> FloatArray:
    """True discounted exercise value of every path, in the payoff's numeraire."""
    value = PAYOFF_REGISTRY[spec.payoff_id].payoff(spec, model, block)
    psi = numeraire_weight(spec, model, grid, block)
    return value if psi is None else value / psi


def apply_numeraire(spec: RewardSpec, model: ModelSpec) -> tuple[RewardSpec, ModelSpec]:
    """
    Transform (reward, model) to the measure of the reward's numeraire.

    The bank numeraire is the identity. The stock numeraire divides the
    reward by psi and simulates the model under the measure with density
    psi(T, X_T), which adds Sigma_11 to the log-price drift.

    Raises:
        RewardError: stock numeraire on a multi-asset or svsi model.
    """
    if spec.numeraire == "bank":
        if model.numeraire != "bank":
            model = model.with_numeraire("bank")
        return spec, model

    if model.dim != 1:
        raise RewardError(f"stock numeraire needs a single asset, model has dim {model.dim}")
    if model.kind == "svsi":
        raise RewardError("stock numeraire is not available for the svsi model")
    logger.debug("Switching %s to the stock numeraire", spec.payoff_id)
    return replace(spec), model.with_numeraire("stock")
