# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Stage timing for pricing runs.

Collects wall time per named stage (coercion build, DP, lower bound, upper
bound, European value) from decorated functions and context managers.
Profiling is off by default; `price --profile` turns it on and prints a
report at exit.
"""

from __future__ import annotations

import functools
import json
import logging
import threading
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TypeVar

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


@dataclass
class StageTiming:
    """Accumulated timing of one named stage."""

    name: str
    call_count: int = 0
    total_time: float = 0.0
    min_time: float = float("inf")
    max_time: float = 0.0

    @property
    def avg_time(self) -> float:
        if not self.call_count:
            return 0.0
        return self.total_time / self.call_count

    def add(self, seconds: float) -> None:
        self.call_count += 1
        self.total_time += seconds
        if seconds < self.min_time:
            self.min_time = seconds
        if seconds > self.max_time:
            self.max_time = seconds

    def to_dict(self) -> dict[str, Any]:
        """Timings in seconds."""
        return {
            "stage": self.name,
            "calls": self.call_count,
            "total_s": self.total_time,
            "mean_s": self.avg_time,
            "min_s": self.min_time if self.call_count else 0.0,
            "max_s": self.max_time,
        }


class StageProfiler:
    """
    Process-wide stage profiler.

    Thread-safe singleton; path-block workers record into it concurrently.
    """

    _instance: StageProfiler | None = None
    _lock = threading.Lock()

    def __new__(cls) -> StageProfiler:
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self) -> None:
        if self._initialized:
            return
        self._initialized = True
        self._stats: dict[str, StageTiming] = {}
        self._stats_lock = threading.Lock()
        self._enabled = False

    def enable(self) -> None:
        """Enable profiling."""
        self._enabled = True
        logger.info("Stage profiling enabled")

    def disable(self) -> None:
        """Disable profiling."""
        self._enabled = False

    def is_enabled(self) -> bool:
        """Check if profiling is currently enabled."""
        return self._enabled

    def reset(self) -> None:
        """Clear all collected timings."""
        with self._stats_lock:
            self._stats.clear()

    def record_timing(self, name: str, duration: float) -> None:
        """Record one timed call of a stage (seconds)."""
        if not self._enabled:
            return
        with self._stats_lock:
            if name not in self._stats:
                self._stats[name] = StageTiming(name=name)
            self._stats[name].add(duration)

    def get_stats(self) -> dict[str, StageTiming]:
        """Copy of all collected timings."""
        with self._stats_lock:
            return dict(self._stats)

    def format_report(self) -> str:
        """Stage table sorted by total time."""
        stats = sorted(self.get_stats().values(), key=lambda s: s.total_time, reverse=True)
        if not stats:
            return "No profiling data collected."
        lines = [
            "=" * 84,
            "STAGE PROFILE",
            "=" * 84,
            f"{'Stage':<36} {'Calls':>8} {'Total(s)':>12} {'Avg(ms)':>12} {'Max(ms)':>12}",
            "-" * 84,
        ]
        for s in stats:
            lines.append(
                f"{s.name:<36} {s.call_count:>8} {s.total_time:>12.3f} "
                f"{s.avg_time * 1000:>12.3f} {s.max_time * 1000:>12.3f}"
            )
        lines.append("=" * 84)
        return "\n".join(lines)

    def print_report(self) -> None:
        """Print the stage table to stdout."""
        print(self.format_report())

    def save_report(self, output_path: Path | str) -> None:
        """Save the collected timings as JSON."""
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        stages = [s.to_dict() for s in self.get_stats().values()]
        path.write_text(json.dumps({"created": time.time(), "stages": stages}, indent=2),
                        encoding="utf-8")
        logger.info("Stage profile written to %s", path)


_profiler = StageProfiler()


def enable_profiling() -> None:
    """Enable global stage profiling."""
    _profiler.enable()


def disable_profiling() -> None:
    """Disable global stage profiling."""
    _profiler.disable()


def reset_profiling() -> None:
    """Reset all profiling statistics."""
    _profiler.reset()


def get_profiler() -> StageProfiler:
    """Get the global profiler instance."""
    return _profiler


@contextmanager
def profile_section(name: str) -> Iterator[None]:
    """
    Context manager for timing a stage.

    Usage:
        with profile_section("coercion.step"):
            ...
    """
    if not _profiler.is_enabled():
        yield
        return
    start = time.perf_counter()
    try:
        yield
    finally:
        _profiler.record_timing(name, time.perf_counter() - start)


def profile_function(name: str | None = None) -> Callable[[F], F]:
    """Decorator timing every call of a function under `name` (default: qualified name)."""

    def decorator(func: F) -> F:
        stage = name or f"{func.__module__}.{func.__qualname__}"

        @functools.wraps(func)
        def timed(*args: Any, **kwargs: Any) -> Any:
            with profile_section(stage):
                return func(*args, **kwargs)

        return timed  # type: ignore[return-value]

    return decorator
