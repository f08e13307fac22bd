# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""Tests for the debug_log module enable/disable functionality."""

import tempfile
from pathlib import Path
from unittest import mock

import numpy as np

from bermuda import debug_log


class TestDebugLogEnableDisable:
    """Test the enable/disable functionality of debug logging."""

    def setup_method(self) -> None:
        """Reset debug log state before each test."""
        debug_log.disable()

    def test_disabled_by_default(self) -> None:
        """Debug logging starts off."""
        assert not debug_log.is_enabled()

    def test_enable(self) -> None:
        """enable() should turn on debug logging."""
        debug_log.enable()
        assert debug_log.is_enabled()

    def test_disable(self) -> None:
        """disable turns logging back off."""
        debug_log.enable()
        debug_log.disable()
        assert not debug_log.is_enabled()

    def test_clear_logs_no_op_when_disabled(self) -> None:
        """clear_logs() should do nothing when logging is disabled."""
        with mock.patch.object(debug_log, '_ensure_log_dir') as mock_ensure:
            debug_log.clear_logs()
            mock_ensure.assert_not_called()

    def test_log_bin_layout_no_op_when_disabled(self) -> None:
        """Nothing is written while disabled."""
        with mock.patch.object(debug_log, '_ensure_log_dir') as mock_ensure:
            debug_log.log_bin_layout(0, np.array([1.0]), np.array([0.5, 1.5]), np.array([2, 2]))
            mock_ensure.assert_not_called()

    def test_log_stopping_region_no_op_when_disabled(self) -> None:
        """Nothing is written while disabled."""
        with mock.patch.object(debug_log, '_ensure_log_dir') as mock_ensure:
            debug_log.log_stopping_region(0, [(0.0, 1.0)])
            mock_ensure.assert_not_called()

    def test_log_bound_no_op_when_disabled(self) -> None:
        """Nothing is written while disabled."""
        with mock.patch.object(debug_log, '_ensure_log_dir') as mock_ensure:
            debug_log.log_bound("lower", 1.0, 0.1, 10)
            mock_ensure.assert_not_called()


class TestDebugLogWrites:
    """Log contents when enabled."""

    def setup_method(self) -> None:
        debug_log.enable()

    def teardown_method(self) -> None:
        debug_log.disable()

    def _patched(self, tmpdir: str):
        log_dir = Path(tmpdir) / "logs"
        return mock.patch.multiple(
            debug_log,
            LOG_DIR=log_dir,
            COERCION_LOG=log_dir / "coercion.log",
            STOPPING_LOG=log_dir / "stopping_rule.log",
            BOUNDS_LOG=log_dir / "bounds.log",
        )

    def test_clear_logs_writes_when_enabled(self) -> None:
        """Clearing writes fresh files only while enabled."""
        with tempfile.TemporaryDirectory() as tmpdir, self._patched(tmpdir):
            debug_log.clear_logs()
            for log_file in (debug_log.COERCION_LOG, debug_log.STOPPING_LOG,
                             debug_log.BOUNDS_LOG):
                assert "New run started" in log_file.read_text(encoding="utf-8")

    def test_bin_layout_is_abbreviated(self) -> None:
        """Long bin layouts are cut down."""
        with tempfile.TemporaryDirectory() as tmpdir, self._patched(tmpdir):
            values = np.arange(20.0)
            debug_log.log_bin_layout(3, values[:-1] + 0.5, values, np.full(20, 4))
            text = debug_log.COERCION_LOG.read_text(encoding="utf-8")
        assert "t=   3" in text
        assert "occupancy=4..4" in text
        assert "(20 entries)" in text

    def test_stopping_region(self) -> None:
        """Stopping regions are written as reward intervals."""
        with tempfile.TemporaryDirectory() as tmpdir, self._patched(tmpdir):
            debug_log.log_stopping_region(1, [(-np.inf, 2.0), (3.0, np.inf)])
            debug_log.log_stopping_region(2, [])
            text = debug_log.STOPPING_LOG.read_text(encoding="utf-8")
        assert "stop on (-inf, 2] U (3, inf]" in text
        assert "stop on never" in text

    def test_bound(self) -> None:
        """Bound lines carry the estimate, error and count."""
        with tempfile.TemporaryDirectory() as tmpdir, self._patched(tmpdir):
            debug_log.log_bound("upper", 13.9, 0.02, 4000)
            text = debug_log.BOUNDS_LOG.read_text(encoding="utf-8")
        assert "upper" in text and "13.900000 (0.020000) n=4000" in text
