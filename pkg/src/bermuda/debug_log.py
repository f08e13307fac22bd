# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Debug logging for inspecting what a pricing run built.

Creates three log files:
- coercion.log: bin edges, bin values and occupancy at each grid time
- stopping_rule.log: the stopping region at each grid time, as reward intervals
- bounds.log: summaries of every bound estimate

Logging is disabled by default. Call enable() to turn it on.
"""

from __future__ import annotations

from collections.abc import Sequence
from datetime import datetime
from pathlib import Path

import numpy as np

# Log files location (relative to the working directory)
LOG_DIR: Path = Path("logs")
COERCION_LOG: Path = LOG_DIR / "coercion.log"
STOPPING_LOG: Path = LOG_DIR / "stopping_rule.log"
BOUNDS_LOG: Path = LOG_DIR / "bounds.log"

# Global flag to control whether debug logging is enabled
_ENABLED: bool = False  # pylint: disable=invalid-name


def enable() -> None:
    """Enable debug logging."""
    global _ENABLED  # pylint: disable=global-statement
    _ENABLED = True


def disable() -> None:
    """Disable debug logging."""
    global _ENABLED  # pylint: disable=global-statement
    _ENABLED = False


def is_enabled() -> bool:
    """Check if debug logging is enabled."""
    return _ENABLED


def _ensure_log_dir() -> None:
    LOG_DIR.mkdir(parents=True, exist_ok=True)


def _timestamp() -> str:
    return datetime.now().strftime("%H:%M:%S.%f")[:-3]


def _append(path: Path, text: str) -> None:
    _ensure_log_dir()
    with open(path, "a", encoding="utf-8") as f:
        f.write(text)


def clear_logs() -> None:
    """Truncate all log files for a fresh run."""
    if not _ENABLED:
        return
    _ensure_log_dir()
    for log_file in (COERCION_LOG, STOPPING_LOG, BOUNDS_LOG):
        with open(log_file, "w", encoding="utf-8") as f:
            f.write(f"=== New run started at {datetime.now().isoformat()} ===\n\n")


def _fmt(values: Sequence[float] | np.ndarray, limit: int = 8) -> str:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size <= limit:
        return " ".join(f"{v:.6g}" for v in arr)
    head = " ".join(f"{v:.6g}" for v in arr[: limit // 2])
    tail = " ".join(f"{v:.6g}" for v in arr[-(limit // 2):])
    return f"{head} ... {tail} ({arr.size} entries)"


def log_bin_layout(
    t_index: int, edges: np.ndarray, values: np.ndarray, occupancy: np.ndarray
) -> None:
    """
    Log the bins placed at one grid time.

    Args:
        t_index: Grid index
        edges: Bin edges (N_bins - 1)
        values: Bin values (N_bins)
        occupancy: Training paths per bin
    """
    if not _ENABLED:
        return
    _append(
        COERCION_LOG,
        f"[{_timestamp()}] t={t_index:4d} occupancy={int(occupancy.min())}..{int(occupancy.max())}\n"
        f"                 edges:  {_fmt(edges)}\n"
        f"                 values: {_fmt(values)}\n",
    )


def log_stopping_region(t_index: int, intervals: list[tuple[float, float]]) -> None:
    """Log the reward intervals in which the rule stops at one grid time."""
    if not _ENABLED:
        return
    if intervals:
        region = " U ".join(f"({lo:.6g}, {hi:.6g}]" for lo, hi in intervals)
    else:
        region = "never"
    _append(STOPPING_LOG, f"[{_timestamp()}] t={t_index:4d} stop on {region}\n")


def log_bound(name: str, mean: float, stderr: float, n: int) -> None:
    """Log one bound estimate."""
    if not _ENABLED:
        return
    _append(BOUNDS_LOG, f"[{_timestamp()}] {name:10} {mean:.6f} ({stderr:.6f}) n={n}\n")
