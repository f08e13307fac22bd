# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""Tests for stage profiling."""

import json
import tempfile
from pathlib import Path

from bermuda.profiling import (
    StageProfiler,
    StageTiming,
    disable_profiling,
    enable_profiling,
    get_profiler,
    profile_function,
    profile_section,
    reset_profiling,
)


class TestStageProfiler:
    """Collecting and reporting stage timings."""

    def setup_method(self) -> None:
        reset_profiling()
        disable_profiling()

    def test_singleton(self) -> None:
        """get_profiler returns one instance."""
        assert StageProfiler() is get_profiler()

    def test_nothing_recorded_when_disabled(self) -> None:
        """A disabled profiler records nothing."""
        with profile_section("stage.quiet"):
            pass
        assert get_profiler().get_stats() == {}
        assert get_profiler().format_report() == "No profiling data collected."

    def test_section_records_when_enabled(self) -> None:
        """An enabled profiler times each section."""
        enable_profiling()
        for _ in range(3):
            with profile_section("stage.loud"):
                pass
        stats = get_profiler().get_stats()["stage.loud"]
        assert stats.call_count == 3
        assert stats.min_time <= stats.avg_time <= stats.max_time

    def test_section_records_on_error(self) -> None:
        """A section still records when its body raises."""
        enable_profiling()
        try:
            with profile_section("stage.fails"):
                raise RuntimeError("boom")
        except RuntimeError:
            pass
        assert get_profiler().get_stats()["stage.fails"].call_count == 1

    def test_decorator(self) -> None:
        """The decorator records under its given name."""
        @profile_function("custom.name")
        def double(x: int) -> int:
            return 2 * x

        assert double(2) == 4
        enable_profiling()
        assert double(3) == 6
        assert get_profiler().get_stats()["custom.name"].call_count == 1

    def test_decorator_default_name(self) -> None:
        """Without a name the decorator uses the qualified function name."""
        @profile_function()
        def helper() -> None:
            return None

        enable_profiling()
        helper()
        names = list(get_profiler().get_stats())
        assert len(names) == 1 and names[0].endswith("helper")

    def test_report_and_json(self) -> None:
        """The report prints and saves as JSON."""
        enable_profiling()
        get_profiler().record_timing("stage.a", 0.5)
        get_profiler().record_timing("stage.b", 1.5)
        report = get_profiler().format_report()
        assert report.index("stage.b") < report.index("stage.a")

        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "out" / "profile.json"
            get_profiler().save_report(path)
            data = json.loads(path.read_text(encoding="utf-8"))
        names = {entry["stage"] for entry in data["stages"]}
        assert names == {"stage.a", "stage.b"}

    def test_timing_dict(self) -> None:
        """Timing records export with their summary keys."""
        timing = StageTiming(name="x", call_count=2, total_time=1.0, min_time=0.25, max_time=0.75)
        d = timing.to_dict()
        assert d["stage"] == "x"
        assert d["mean_s"] == 0.5
        assert d["min_s"] == 0.25
        assert StageTiming(name="empty").to_dict()["min_s"] == 0.0

    def test_add_tracks_extremes(self) -> None:
        """Repeated adds keep the min and max."""
        timing = StageTiming(name="x")
        for seconds in (0.3, 0.1, 0.2):
            timing.add(seconds)
        assert timing.call_count == 3
        assert (timing.min_time, timing.max_time) == (0.1, 0.3)
