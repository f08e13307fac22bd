# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""Tests for the artifact inspector."""

import io
import sys
import tempfile
from pathlib import Path
from unittest import mock

import pytest

from bermuda.artifact import save_artifact
from bermuda.chain_dp import solve_chain
from bermuda.inspect_artifact import describe_artifact, main


class TestDescribeArtifact:
    """Summary text for a solved chain."""

    def test_one_section_per_time(self, make_chain) -> None:
        """Output has one section per grid time."""
        c = make_chain(n_times=4, n_bins=3, lockout=0.5)
        out = io.StringIO()
        describe_artifact(c, solve_chain(c), out)
        text = out.getvalue()
        assert "N_T=4, N_bins=3" in text
        assert text.count("stop on:") == 4
        assert text.count("(locked out)") == 2
        assert "bin " not in text

    def test_bin_listing(self, make_chain) -> None:
        """-b lists value and stop flag per bin."""
        c = make_chain(n_times=2, n_bins=3)
        out = io.StringIO()
        describe_artifact(c, solve_chain(c), out, show_values=True)
        assert out.getvalue().count("bin ") == 6


class TestInspectMain:
    """Command-line behaviour."""

    def test_missing_artifact(self) -> None:
        """A missing artifact exits with 1."""
        with mock.patch.object(sys, "argv", ["bermuda-inspect", "/nonexistent/chain.bin"]):
            with pytest.raises(SystemExit) as exc:
                main()
        assert exc.value.code == 1

    def test_writes_output_file(self, make_chain) -> None:
        """-o writes the listing to a file."""
        c = make_chain(n_times=3, n_bins=2)
        with tempfile.TemporaryDirectory() as tmpdir:
            artifact = Path(tmpdir) / "chain.bin"
            summary = Path(tmpdir) / "summary.txt"
            save_artifact(artifact, c)
            argv = ["bermuda-inspect", str(artifact), "-o", str(summary), "-b"]
            with mock.patch.object(sys, "argv", argv):
                main()
            text = summary.read_text(encoding="utf-8")
        assert text.count("stop on:") == 3
