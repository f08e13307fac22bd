# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Experiment orchestration and reporting.

run_experiment executes the four pricing stages for one config:
build the coercion, solve the chain, estimate the lower bound, estimate
the upper bound (plus the European value for reference). Every stage
draws from its own stream purpose, so stages never share random numbers.
sweep runs many configs and keeps going past failed rows.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd
import yaml

from . import debug_log
from .artifact import ArtifactError, load_artifact, save_artifact
from .bounds import BoundEstimate, european_value, gap_pct, lower_bound, upper_bound
from .chain_dp import solve_chain, value_at
from .coercion import build_coercion
from .config import (
    ExperimentConfig,
    build_grid,
    build_model_spec,
    build_reward_spec,
    echo_config,
    scaled_sizes,
)
from .models import create_model
from .profiling import profile_section
from .rewards import apply_numeraire, reward
from .streams import StreamFactory
from .workers import resolve_threads

logger = logging.getLogger(__name__)

LEAD_COLUMNS: tuple[str, ...] = ("example", "label", "seed")
RESULT_COLUMNS: tuple[str, ...] = (
    "ref_price",
    "eur_mean",
    "eur_se",
    "low_mean",
    "low_se",
    "high_mean",
    "high_se",
    "gap_pct",
    "seconds",
    "error",
)


@dataclass
class ReportRow:
    """One priced table row."""

    example: str
    label: str
    seed: int
    varied: dict[str, Any]
    ref_price: float | None = None
    european: BoundEstimate | None = None
    low: BoundEstimate | None = None
    high: BoundEstimate | None = None
    chain_value: float | None = None
    seconds: float = 0.0
    error: str | None = None

    @property
    def gap_pct(self) -> float:
        if self.low is None or self.high is None:
            return math.nan
        return gap_pct(self.low, self.high)

    def as_record(self) -> dict[str, Any]:
        """Flat record in report column order (varied parameters after the lead columns)."""

        def part(est: BoundEstimate | None, attr: str) -> float:
            return math.nan if est is None else float(getattr(est, attr))

        record: dict[str, Any] = {"example": self.example, "label": self.label, "seed": self.seed}
        record.update(self.varied)
        record.update({
            "ref_price": math.nan if self.ref_price is None else self.ref_price,
            "eur_mean": part(self.european, "mean"),
            "eur_se": part(self.european, "stderr"),
            "low_mean": part(self.low, "mean"),
            "low_se": part(self.low, "stderr"),
            "high_mean": part(self.high, "mean"),
            "high_se": part(self.high, "stderr"),
            "gap_pct": self.gap_pct,
            "seconds": self.seconds,
            "error": self.error or "",
        })
        return record


@dataclass
class Report:
    """Rows of a run or sweep plus the resolved config of each row."""

    rows: list[ReportRow] = field(default_factory=list)
    configs: list[dict[str, Any]] = field(default_factory=list)

    def extend(self, other: Report) -> None:
        self.rows.extend(other.rows)
        self.configs.extend(other.configs)

    @property
    def failed(self) -> bool:
        """True if any row recorded an error."""
        return any(row.error for row in self.rows)

    def columns(self) -> list[str]:
        varied: list[str] = []
        for row in self.rows:
            for key in row.varied:
                if key not in varied and key not in LEAD_COLUMNS and key not in RESULT_COLUMNS:
                    varied.append(key)
        return [*LEAD_COLUMNS, *varied, *RESULT_COLUMNS]

    def to_frame(self) -> pd.DataFrame:
        """The report as a DataFrame in fixed column order."""
        return pd.DataFrame([row.as_record() for row in self.rows], columns=self.columns())

    def write_csv(self, path: Path | str) -> Path:
        """
        Write the CSV and a `<name>.config.yaml` sidecar echoing every row's config.

        Returns:
            The sidecar path.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.6g")
        sidecar = path.with_suffix(".config.yaml")
        with open(sidecar, "w", encoding="utf-8") as f:
            yaml.safe_dump_all(self.configs, f, default_flow_style=False, sort_keys=False)
        logger.info("Wrote %d rows to %s", len(self.rows), path)
        return sidecar

    def format_table(self) -> str:
        """Aligned text rendering for the terminal."""
        if not self.rows:
            return "(no rows)"
        frame = self.to_frame()
        if not frame["error"].astype(bool).any():
            frame = frame.drop(columns=["error"])
        return frame.to_string(index=False, float_format=lambda v: f"{v:.4f}", na_rep="-")


def run_experiment(
    cfg: ExperimentConfig,
    save_coercion: Path | str | None = None,
    load_coercion: Path | str | None = None,
) -> Report:
    """
    Price one table row.

    Args:
        cfg: A validated experiment config.
        save_coercion: Write the coercion and its solved table here.
        load_coercion: Reuse a saved coercion instead of building one.

    Raises:
        ArtifactError: The loaded artifact does not fit the config.
    """
    start = time.perf_counter()
    sizes = scaled_sizes(cfg)
    threads = resolve_threads(cfg["threads"])
    streams = StreamFactory(seed=cfg["seed"])
    grid = build_grid(cfg)
    spec, model_spec = apply_numeraire(build_reward_spec(cfg), build_model_spec(cfg))
    model = create_model(model_spec)
    logger.info(
        "Running %s (%s): bins=%d block=%d primal=%d dual=%d sub=%d threads=%d",
        cfg["label"], cfg["example"], sizes["n_bins"], sizes["n_block"],
        sizes["n_primal"], sizes["n_dual"], sizes["n_sub"], threads,
    )
    debug_log.clear_logs()

    table = None
    if load_coercion is not None:
        coercion, table = load_artifact(load_coercion, grid, sizes["n_bins"])
    else:
        with profile_section("stage.coercion"):
            coercion = build_coercion(
                model, spec, grid, sizes["n_bins"], sizes["n_block"], streams, threads
            )

    if table is None:
        with profile_section("stage.dp"):
            table = solve_chain(coercion, grid)
    if table.value.shape != (grid.n_times, coercion.n_bins):
        raise ArtifactError("stored value table does not match the coercion")
    if save_coercion is not None:
        save_artifact(save_coercion, coercion, table)

    y0 = reward(spec, model, grid, model.init_paths(grid, 1))
    chain_v0 = float(value_at(table, coercion, 0, float(y0[0])))
    logger.info("Chain value V(0, Y_0) = %.6f", chain_v0)

    with profile_section("stage.lower"):
        low = lower_bound(model, spec, coercion, table, sizes["n_primal"], streams, threads)
    with profile_section("stage.upper"):
        high = upper_bound(
            model, spec, coercion, table, sizes["n_dual"], sizes["n_sub"], streams, threads
        )
    with profile_section("stage.european"):
        european = european_value(model, spec, grid, sizes["n_primal"], streams, threads)

    row = ReportRow(
        example=cfg["example"],
        label=cfg["label"],
        seed=cfg["seed"],
        varied=dict(cfg["varied"]),
        ref_price=cfg["reference_price"],
        european=european,
        low=low,
        high=high,
        chain_value=chain_v0,
        seconds=time.perf_counter() - start,
    )
    if low.mean - 3.0 * low.stderr > high.mean + 3.0 * high.stderr:
        logger.warning("%s: lower bound exceeds upper bound beyond 3 stderr", cfg["label"])
    return Report(rows=[row], configs=[echo_config(cfg)])


def sweep(cfgs: Iterable[ExperimentConfig]) -> Report:
    """
    Run configs one after another and gather them into one report.

    A failing row is logged and recorded with its error; later rows still run.
    """
    report = Report()
    for cfg in cfgs:
        try:
            report.extend(run_experiment(cfg))
        except Exception as e:  # pylint: disable=broad-exception-caught
            logger.error("Row %s failed: %s", cfg["label"], e, exc_info=True)
            report.rows.append(ReportRow(
                example=cfg["example"],
                label=cfg["label"],
                seed=cfg["seed"],
                varied=dict(cfg["varied"]),
                ref_price=cfg["reference_price"],
                error=f"{type(e).__name__}: {e}",
            ))
            report.configs.append(echo_config(cfg))
    return report
