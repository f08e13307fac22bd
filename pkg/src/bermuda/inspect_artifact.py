# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Inspect a saved coercion artifact.

Prints, for every grid time, the stopping region as a union of reward
intervals together with the chain value at each bin value. The
artifact must have been saved with its solved table, or the table is
solved on the spot.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TextIO

import numpy as np

from .artifact import ArtifactError, load_artifact
from .chain_dp import ValueStoppingTable, solve_chain
from .coercion import Coercion


def _interval_text(intervals: list[tuple[float, float]]) -> str:
    if not intervals:
        return "never"
    return " U ".join(f"({lo:.6g}, {hi:.6g}]" for lo, hi in intervals)


def describe_artifact(
    c: Coercion,
    table: ValueStoppingTable,
    output: TextIO,
    show_values: bool = False,
) -> None:
    """
    Write a per-time summary of the stopping rule.

    Args:
        c: The coerced chain.
        table: Its solved value/stopping table.
        output: Stream to write to.
        show_values: Also list (bin value, V) for every bin.
    """
    grid = c.grid
    output.write("=" * 80 + "\n")
    output.write(
        f"Coercion: N_T={c.n_times}, N_bins={c.n_bins}, N_block={c.n_block} "
        f"({c.n_sim} training paths)\n"
    )
    output.write("=" * 80 + "\n")

    for t in range(grid.n_times):
        tag = "" if grid.exercise_mask[t] else " (locked out)"
        output.write(f"\nt[{t}] = {grid.times[t]:.6g}{tag}\n")
        output.write(f"  stop on: {_interval_text(table.stopping_intervals(c, t))}\n")
        output.write(
            f"  V range: {table.value[t].min():.6g} .. {table.value[t].max():.6g}; "
            f"stopping bins: {int(np.count_nonzero(table.stop[t]))}/{c.n_bins}\n"
        )
        if show_values:
            for k in range(c.n_bins):
                mark = "*" if table.stop[t, k] else " "
                output.write(
                    f"    {mark} bin {k:4d}: value={c.values[t, k]:.6g} V={table.value[t, k]:.6g}\n"
                )


def main() -> None:
    """CLI entry point for the artifact inspector."""
    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        description="Show the stopping rule stored in a coercion artifact"
    )
    parser.add_argument("artifact", type=Path, help="Path to a file written by --save-coercion")
    parser.add_argument(
        "-o", "--output", type=Path, default=None, help="Output file path (default: stdout)"
    )
    parser.add_argument(
        "-b", "--bins", action="store_true", help="List every bin's value and chain value"
    )
    args: argparse.Namespace = parser.parse_args()

    if not args.artifact.exists():
        print(f"Error: Artifact not found: {args.artifact}", file=sys.stderr)
        sys.exit(1)

    try:
        coercion, table = load_artifact(args.artifact)
    except ArtifactError as e:
        print(f"Error loading artifact: {e}", file=sys.stderr)
        sys.exit(1)
    if table is None:
        table = solve_chain(coercion)

    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            describe_artifact(coercion, table, f, args.bins)
        print(f"Summary written to: {args.output}")
    else:
        describe_artifact(coercion, table, sys.stdout, args.bins)


if __name__ == "__main__":
    main()
