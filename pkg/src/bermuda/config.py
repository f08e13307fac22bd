# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Experiment configuration.

One YAML file describes one table row: the model, the reward, the grid,
the simulation sizes and the seed. Files are merged over DEFAULT_CONFIG,
so a preset only lists what differs from the defaults.
"""

from __future__ import annotations

import copy
import logging
import math
import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any, TypedDict

import yaml

from .process_model import MODEL_KINDS, ModelError, ModelSpec, SvsiParams, TimeGrid
from .rewards import PAYOFF_REGISTRY, RewardError, RewardSpec, apply_numeraire

logger = logging.getLogger(__name__)

# The eight studies the presets reproduce
EXAMPLES: tuple[str, ...] = (
    "min_put",
    "max_call",
    "basket_put",
    "asian_fixed",
    "asian_float",
    "lookback_window",
    "range_window",
    "svsi",
)

ENV_SEED: str = "BERMUDA_SEED"
ENV_THREADS: str = "BERMUDA_THREADS"

MAX_SCALE: float = 10.0
MIN_SCALED_BINS: int = 10


class ConfigError(ValueError):
    """Raised for unreadable or invalid experiment configs."""


class SvsiSettings(TypedDict):
    """Parameters of the stochastic volatility / interest model."""
    rho_s: float
    rho_xi: float
    rho_r: float
    sigma_bar: float
    r_bar: float
    beta_xi: float
    sigma_xi: float
    beta_r: float
    sigma_r: float
    sigma0: float
    r0: float


class ModelSettings(TypedDict):
    """Type definition for the model section."""
    kind: str
    dim: int
    spot: float | list[float]
    rate: float
    dividend: float
    vol: float | list[float]
    correlation: float
    average_window: float  # Asian: length of the initial averaging window
    average0: float | None  # Asian: initial average (default: spot)
    window: int | None  # Window payoffs: number of lags a
    svsi: SvsiSettings


class RewardSettings(TypedDict):
    """Type definition for the reward section."""
    payoff: str
    strike: float | None
    epsilon: float
    numeraire: str  # "bank" or "stock"


class GridSettings(TypedDict):
    """Type definition for the time grid section."""
    expiry: float
    n_times: int
    lockout: float


class SizeSettings(TypedDict):
    """Simulation counts at scale 1."""
    n_bins: int
    n_block: int
    n_primal: int
    n_dual: int
    n_sub: int


class ExperimentConfig(TypedDict):
    """Type definition for the complete configuration of one table row."""
    label: str
    example: str
    varied: dict[str, Any]
    reference_price: float | None
    model: ModelSettings
    reward: RewardSettings
    grid: GridSettings
    sizes: SizeSettings
    seed: int
    scale: float
    threads: int
    output: str | None


DEFAULT_CONFIG: ExperimentConfig = {
    "label": "unnamed",
    "example": "min_put",
    "varied": {},
    "reference_price": None,
    "model": {
        "kind": "multi_gbm",
        "dim": 2,
        "spot": 100.0,
        "rate": 0.06,
        "dividend": 0.0,
        "vol": 0.6,
        "correlation": 0.0,
        "average_window": 0.25,
        "average0": None,
        "window": None,
        "svsi": {
            "rho_s": 0.3,
            "rho_xi": 0.3,
            "rho_r": 0.3,
            "sigma_bar": 0.6,
            "r_bar": 0.06,
            "beta_xi": 4.5,
            "sigma_xi": 0.3,
            "beta_r": 0.02,
            "sigma_r": 0.12,
            "sigma0": 0.6,
            "r0": 0.06,
        },
    },
    "reward": {
        "payoff": "min_put",
        "strike": 100.0,
        "epsilon": 1e-6,
        "numeraire": "bank",
    },
    "grid": {
        "expiry": 0.5,
        "n_times": 40,
        "lockout": 0.0,
    },
    "sizes": {
        "n_bins": 200,
        "n_block": 200,
        "n_primal": 50000,
        "n_dual": 400,
        "n_sub": 60,
    },
    "seed": 20240101,
    # Desk scale; 1.0 reproduces the table sizes
    "scale": 0.25,
    # 0 means one worker per CPU
    "threads": 1,
    "output": None,
}


def _deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    """
    Deep merge two dictionaries, with override taking precedence.
    Returns a new dictionary without modifying the originals.
    """
    result = copy.deepcopy(dict(base))
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def validate_config(cfg: ExperimentConfig) -> None:
    """
    Check a merged config, raising ConfigError on the first problem.

    Model and reward parameters are checked by building their specs, so
    the messages match what a run would report.
    """
    unknown = set(cfg) - set(DEFAULT_CONFIG)
    _require(not unknown, f"unknown config keys: {', '.join(sorted(unknown))}")
    _require(cfg["example"] in EXAMPLES,
             f"Unknown example: {cfg['example']}. Available examples: {', '.join(EXAMPLES)}")
    _require(cfg["model"]["kind"] in MODEL_KINDS,
             f"Unknown model kind: {cfg['model']['kind']}. Available: {', '.join(MODEL_KINDS)}")
    _require(cfg["reward"]["payoff"] in PAYOFF_REGISTRY,
             f"Unknown payoff: {cfg['reward']['payoff']}")

    seed = cfg["seed"]
    _require(isinstance(seed, int) and not isinstance(seed, bool) and 0 <= seed < 2**64,
             f"seed must be a 64-bit non-negative integer, got {seed!r}")
    scale = cfg["scale"]
    _require(isinstance(scale, (int, float)) and 0.0 < scale <= MAX_SCALE,
             f"scale must lie in (0, {MAX_SCALE}], got {scale!r}")
    _require(isinstance(cfg["threads"], int) and cfg["threads"] >= 0,
             f"threads must be a non-negative integer, got {cfg['threads']!r}")

    for name, value in cfg["sizes"].items():
        _require(isinstance(value, int) and value >= 1, f"sizes.{name} must be a positive integer")
    _require(cfg["sizes"]["n_bins"] >= 2, "sizes.n_bins must be at least 2")

    for key in ("model", "reward", "grid", "sizes"):
        unknown = set(cfg[key]) - set(DEFAULT_CONFIG[key])  # type: ignore[literal-required]
        _require(not unknown, f"unknown {key} keys: {', '.join(sorted(unknown))}")

    try:
        build_grid(cfg)
        model = build_model_spec(cfg)
        reward = build_reward_spec(cfg)
        apply_numeraire(reward, model)
    except (ModelError, RewardError, TypeError) as e:
        raise ConfigError(str(e)) from e

    # Payoff must fit the model kind
    kinds = PAYOFF_REGISTRY[reward.payoff_id].model_kinds
    _require(model.kind in kinds,
             f"payoff {reward.payoff_id} cannot be priced on a {model.kind} model")


def config_from_dict(data: Mapping[str, Any] | None) -> ExperimentConfig:
    """Merge a (possibly partial) mapping over the defaults and validate it."""
    if data is not None and not isinstance(data, Mapping):
        raise ConfigError("config must be a mapping at the top level")
    cfg: dict[str, Any] = _deep_merge(DEFAULT_CONFIG, data or {})
    validate_config(cfg)  # type: ignore[arg-type]
    return cfg  # type: ignore[return-value]


def load_config(config_path: Path | str) -> ExperimentConfig:
    """
    Load an experiment config, merged with defaults.

    Raises:
        ConfigError: The file is missing, is not YAML, or fails validation.
    """
    config_path = Path(config_path)
    try:
        with open(config_path, encoding="utf-8") as f:
            file_config: dict[str, Any] | None = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Could not load config from {config_path}: {e}") from e
    try:
        return config_from_dict(file_config)
    except ConfigError as e:
        raise ConfigError(f"{config_path}: {e}") from e


def echo_config(cfg: ExperimentConfig) -> dict[str, Any]:
    """A plain, complete copy of the config; config_from_dict reproduces it."""
    return copy.deepcopy(dict(cfg))


def save_config(cfg: ExperimentConfig, config_path: Path | str) -> bool:
    """
    Save a config to YAML.

    Returns:
        True if save was successful, False otherwise.
    """
    config_path = Path(config_path)
    try:
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(echo_config(cfg), f, default_flow_style=False, sort_keys=False)
        return True
    except (OSError, yaml.YAMLError) as e:
        logger.error("Error saving config to %s: %s", config_path, e)
        return False


def apply_env_overrides(
    cfg: ExperimentConfig, environ: Mapping[str, str] | None = None
) -> ExperimentConfig:
    """Apply BERMUDA_SEED and BERMUDA_THREADS over the file values."""
    environ = os.environ if environ is None else environ
    overrides: dict[str, Any] = {}
    for var, key in ((ENV_SEED, "seed"), (ENV_THREADS, "threads")):
        raw = environ.get(var)
        if raw is None or raw == "":
            continue
        try:
            overrides[key] = int(raw, 0)
        except ValueError as e:
            raise ConfigError(f"{var} must be an integer, got {raw!r}") from e
    return with_overrides(cfg, overrides)


def scaled_sizes(cfg: ExperimentConfig) -> SizeSettings:
    """
    Simulation counts after applying the scale.

    n_block, n_primal and n_dual scale linearly; n_bins and n_sub scale
    with sqrt(scale), floored at 10. The floor never lifts a count above its
    table value; scales above 1 grow them past it.
    """
    scale = float(cfg["scale"])
    sizes = cfg["sizes"]

    def linear(n: int) -> int:
        return max(1, int(round(n * scale)))

    def root(n: int) -> int:
        return max(min(n, MIN_SCALED_BINS), int(round(n * math.sqrt(scale))))

    return {
        "n_bins": root(sizes["n_bins"]),
        "n_block": linear(sizes["n_block"]),
        "n_primal": linear(sizes["n_primal"]),
        "n_dual": linear(sizes["n_dual"]),
        "n_sub": root(sizes["n_sub"]),
    }


def build_grid(cfg: ExperimentConfig) -> TimeGrid:
    """The exercise grid of a config."""
    grid = cfg["grid"]
    return TimeGrid.uniform(float(grid["expiry"]), int(grid["n_times"]), float(grid["lockout"]))


def build_model_spec(cfg: ExperimentConfig) -> ModelSpec:
    """The ModelSpec of a config (under the bank numeraire)."""
    m = cfg["model"]
    svsi = SvsiParams(**m["svsi"]) if m["kind"] == "svsi" else None
    return ModelSpec.build(
        kind=m["kind"],
        dim=int(m["dim"]),
        spot=m["spot"],
        rate=float(m["rate"]),
        vol=m["vol"],
        correlation=float(m["correlation"]),
        dividend=float(m["dividend"]),
        average_window=float(m["average_window"]),
        average0=None if m["average0"] is None else float(m["average0"]),
        window=None if m["window"] is None else int(m["window"]),
        svsi=svsi,
    )


def build_reward_spec(cfg: ExperimentConfig) -> RewardSpec:
    """The RewardSpec of a config."""
    r = cfg["reward"]
    return RewardSpec(
        payoff_id=r["payoff"],
        strike=None if r["strike"] is None else float(r["strike"]),
        epsilon=float(r["epsilon"]),
        numeraire=r["numeraire"],
    )


def with_overrides(cfg: ExperimentConfig, overrides: Mapping[str, Any]) -> ExperimentConfig:
    """A validated copy of cfg with (nested) overrides applied."""
    if not overrides:
        return cfg
    return config_from_dict(_deep_merge(cfg, overrides))
