# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""Tests for saving and loading coercion artifacts."""

import struct
import tempfile
from pathlib import Path

import numpy as np
import pytest

from bermuda.artifact import HEADER, MAGIC, ArtifactError, load_artifact, save_artifact
from bermuda.chain_dp import solve_chain
from bermuda.process_model import TimeGrid


class TestArtifactRoundTrip:
    """save_artifact followed by load_artifact."""

    def test_with_table(self, make_chain) -> None:
        """A chain and its table survive a save and load."""
        c = make_chain(n_times=4, n_bins=3, lockout=0.5)
        table = solve_chain(c)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            save_artifact(path, c, table)
            loaded, loaded_table = load_artifact(path, c.grid)

        np.testing.assert_array_equal(loaded.edges, c.edges)
        np.testing.assert_array_equal(loaded.values, c.values)
        np.testing.assert_array_equal(loaded.trans, c.trans)
        assert loaded.n_block == c.n_block
        assert loaded_table is not None
        np.testing.assert_array_equal(loaded_table.value, table.value)
        np.testing.assert_array_equal(loaded_table.stop, table.stop)

    def test_without_table_restores_grid(self, make_chain) -> None:
        """Loading without a grid restores the stored one."""
        c = make_chain(n_times=3, n_bins=2, lockout=0.4)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "nested" / "chain.bin"
            save_artifact(path, c)
            loaded, table = load_artifact(path)
        assert table is None
        np.testing.assert_array_equal(loaded.grid.times, c.grid.times)
        np.testing.assert_array_equal(loaded.grid.exercise_mask, c.grid.exercise_mask)

    def test_chain_comes_first_in_the_file(self, make_chain) -> None:
        """Magic, N_T, N_bins, then edges, values and P as little-endian reals."""
        c = make_chain(n_times=3, n_bins=4)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            save_artifact(path, c)
            data = path.read_bytes()

        assert data[:5] == b"BMCZ1"
        assert struct.unpack_from("<II", data, 5) == (3, 4)
        n_reals = 3 * 3 + 3 * 4 + 2 * 4 * 4
        body = np.frombuffer(data, dtype="<f8", count=n_reals, offset=13)
        np.testing.assert_array_equal(body[:9].reshape(3, 3), c.edges)
        np.testing.assert_array_equal(body[9:21].reshape(3, 4), c.values)
        np.testing.assert_array_equal(body[21:].reshape(2, 4, 4), c.trans)


class TestArtifactErrors:
    """Unreadable or mismatched artifacts."""

    def test_missing_file(self) -> None:
        """A missing file is an ArtifactError."""
        with pytest.raises(ArtifactError, match="cannot read"):
            load_artifact("/nonexistent/chain.bin")

    def test_bad_magic(self) -> None:
        """Files without the magic are rejected."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            path.write_bytes(b"NOTIT" + bytes(64))
            with pytest.raises(ArtifactError, match="bad magic"):
                load_artifact(path)

    def test_truncated_body(self, make_chain) -> None:
        """Truncated files are rejected."""
        c = make_chain(n_times=3, n_bins=3)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            save_artifact(path, c)
            path.write_bytes(path.read_bytes()[:-8])
            with pytest.raises(ArtifactError, match="expected"):
                load_artifact(path)

    def test_invalid_header(self) -> None:
        """Headers with fewer than two times or bins are rejected."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            path.write_bytes(MAGIC + HEADER.pack(1, 3))
            with pytest.raises(ArtifactError, match="invalid header"):
                load_artifact(path)

    def test_grid_mismatch(self, make_chain) -> None:
        """A chain built on another grid is rejected."""
        c = make_chain(n_times=4, n_bins=3)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            save_artifact(path, c)
            with pytest.raises(ArtifactError, match="different time grid"):
                load_artifact(path, TimeGrid.uniform(2.0, 4))
            with pytest.raises(ArtifactError, match="different time grid"):
                load_artifact(path, TimeGrid.uniform(1.0, 4, lockout=0.5))

    def test_bin_count_mismatch(self, make_chain) -> None:
        """A chain with another bin count is rejected."""
        c = make_chain(n_times=3, n_bins=3)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            save_artifact(path, c)
            with pytest.raises(ArtifactError, match="asks for 5"):
                load_artifact(path, n_bins=5)
            load_artifact(path, n_bins=3)

    def test_corrupt_transitions(self, make_chain) -> None:
        """Transition rows that do not sum to 1 are rejected."""
        c = make_chain(n_times=3, n_bins=3)
        c.trans[0, 0, 0] += 0.5
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "chain.bin"
            save_artifact(path, c)
            with pytest.raises(ArtifactError, match="invalid coercion"):
                load_artifact(path)
