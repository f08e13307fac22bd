# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Flat-file persistence for a coerced chain and its solved table.

Layout (integers unsigned 32-bit, reals 64-bit, everything little-endian,
arrays row-major):

    magic     b"BMCZ1"
    header    N_T, N_bins
    edges     N_T x (N_bins - 1)
    values    N_T x N_bins
    trans     (N_T - 1) x N_bins x N_bins

A reader that only needs the chain can stop there. The trailing sections
restore the grid and, when present, the solved table:

    extra     N_block, has_table
    times     N_T
    mask      N_T            (exercise permissions as 0.0 / 1.0)
    value     N_T x N_bins   (only if has_table)
    stop      N_T x N_bins   (only if has_table, 0.0 / 1.0)
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from .chain_dp import ValueStoppingTable
from .coercion import Coercion
from .process_model import FloatArray, TimeGrid

logger = logging.getLogger(__name__)

MAGIC: bytes = b"BMCZ1"
HEADER = struct.Struct("<II")
EXTRA = struct.Struct("<II")
_REAL = np.dtype("<f8")


class ArtifactError(ValueError):
    """Raised for unreadable artifacts or artifacts that do not fit a run."""


def _real_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype=_REAL).tobytes()


def save_artifact(path: Path | str, c: Coercion, table: ValueStoppingTable | None = None) -> None:
    """Write a coercion (and optionally its solved table) to `path`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(HEADER.pack(c.n_times, c.n_bins))
        for arr in (c.edges, c.values, c.trans):
            f.write(_real_bytes(arr))
        f.write(EXTRA.pack(c.n_block, int(table is not None)))
        f.write(_real_bytes(c.grid.times))
        f.write(_real_bytes(c.grid.exercise_mask))
        if table is not None:
            f.write(_real_bytes(table.value))
            f.write(_real_bytes(table.stop))
    logger.info("Saved coercion artifact to %s", path)


class _Reader:
    """Sequential reads over the artifact bytes with length checks."""

    def __init__(self, data: bytes, path: Path) -> None:
        self.data = data
        self.path = path
        self.offset = 0

    def unpack(self, layout: struct.Struct, what: str) -> tuple[int, ...]:
        if len(self.data) < self.offset + layout.size:
            raise ArtifactError(f"{self.path} is truncated (no {what})")
        fields = layout.unpack_from(self.data, self.offset)
        self.offset += layout.size
        return fields

    def reals(self, *shape: int) -> FloatArray:
        count = int(np.prod(shape))
        end = self.offset + count * _REAL.itemsize
        if len(self.data) < end:
            raise ArtifactError(f"{self.path} has {len(self.data)} bytes, expected at least {end}")
        arr = np.frombuffer(self.data, dtype=_REAL, count=count, offset=self.offset)
        self.offset = end
        return arr.reshape(shape).copy()


def load_artifact(
    path: Path | str, grid: TimeGrid | None = None, n_bins: int | None = None
) -> tuple[Coercion, ValueStoppingTable | None]:
    """
    Read an artifact written by save_artifact.

    Args:
        path: Artifact file.
        grid: If given, the artifact's grid must match it.
        n_bins: If given, the artifact must have this many bins per time.

    Raises:
        ArtifactError: Bad magic, truncated data, or a grid or bin-count
            mismatch.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ArtifactError(f"cannot read artifact {path}: {e}") from e

    if not data.startswith(MAGIC):
        raise ArtifactError(f"{path} is not a coercion artifact (bad magic)")
    reader = _Reader(data, path)
    reader.offset = len(MAGIC)
    n_t, n_b = reader.unpack(HEADER, "header")
    if n_t < 2 or n_b < 2:
        raise ArtifactError(f"{path} has an invalid header: N_T={n_t}, N_bins={n_b}")
    if n_bins is not None and n_b != n_bins:
        raise ArtifactError(f"{path} has {n_b} bins per time, the run asks for {n_bins}")

    edges = reader.reals(n_t, n_b - 1)
    values = reader.reals(n_t, n_b)
    trans = reader.reals(n_t - 1, n_b, n_b)
    n_block, has_table = reader.unpack(EXTRA, "grid section")
    times = reader.reals(n_t)
    mask = reader.reals(n_t) > 0.5
    stored_table = (reader.reals(n_t, n_b), reader.reals(n_t, n_b) > 0.5) if has_table else None
    if reader.offset != len(data):
        raise ArtifactError(f"{path} has {len(data)} bytes, expected {reader.offset}")
    if n_block < 1:
        raise ArtifactError(f"{path} has an invalid header: N_block={n_block}")

    stored = TimeGrid(times=times, exercise_mask=mask)
    if grid is not None and (
        grid.n_times != stored.n_times
        or not np.allclose(grid.times, stored.times, rtol=0.0, atol=1e-12)
        or not np.array_equal(grid.exercise_mask, stored.exercise_mask)
    ):
        raise ArtifactError(f"{path} was built on a different time grid")

    coercion = Coercion(
        edges=edges,
        values=values,
        trans=trans,
        grid=grid if grid is not None else stored,
        n_bins=n_b,
        n_block=n_block,
    )
    try:
        coercion.check()
    except ValueError as e:
        raise ArtifactError(f"{path} holds an invalid coercion: {e}") from e

    table = None
    if stored_table is not None:
        value, stop = stored_table
        table = ValueStoppingTable(value=value, stop=stop, grid=coercion.grid)
    logger.info("Loaded coercion artifact %s (N_T=%d, N_bins=%d)", path, n_t, n_b)
    return coercion, table
