# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Counter-based random streams.

Every draw is keyed by (seed, purpose, path block, grid index), so a path
block sees the same numbers whichever worker thread simulates it, and the
subsimulation draws can never coincide with the draws that advance the
parent paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

# Paths per random block. Changing this changes every estimate.
PATH_BLOCK: int = 4096


class Purpose(IntEnum):
    """Stream purpose tags; each stage of a run draws from its own tag."""

    BUILD = 1
    PRIMAL = 2
    DUAL = 3
    SUBSIM = 4
    EUROPEAN = 5


@dataclass(frozen=True)
class StreamFactory:
    """
    Creates independent Philox generators keyed by purpose, block and time.

    Args:
        seed: 64-bit master seed.
        tags: Optional remapping of purpose tags to other integers (used to
            check that estimates do not depend on which tag a stage draws from).
    """

    seed: int
    tags: dict[int, int] = field(default_factory=dict)

    def tag(self, purpose: Purpose) -> int:
        """The integer tag used for a purpose."""
        return self.tags.get(int(purpose), int(purpose))

    def generator(self, purpose: Purpose, block: int, t_index: int) -> np.random.Generator:
        """Generator for one path block at one grid index."""
        seq = np.random.SeedSequence(
            entropy=int(self.seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=(self.tag(purpose), int(block), int(t_index)),
        )
        return np.random.Generator(np.random.Philox(seq))

    def with_tag(self, purpose: Purpose, tag: int) -> StreamFactory:
        """Copy of this factory drawing `purpose` from a different tag."""
        tags = dict(self.tags)
        tags[int(purpose)] = int(tag)
        return StreamFactory(seed=self.seed, tags=tags)


def block_sizes(n_paths: int, block: int = PATH_BLOCK) -> list[int]:
    """Split n_paths into consecutive blocks of at most `block` paths."""
    if n_paths < 1:
        raise ValueError(f"need at least one path, got {n_paths}")
    full, rest = divmod(n_paths, block)
    return [block] * full + ([rest] if rest else [])
