"""
Seed Hierarchy

Independent, reproducible random streams per (cell, purpose), spawned from
one master seed with numpy's SeedSequence.
"""

from enum import Enum

import numpy as np

from coev_grid.grid.topology import CellId


class StreamKind(Enum):
    """Purpose of a random stream; the value is its spawn-key component."""
    INIT = 0
    DATA = 1
    TRAINING = 2
    MIXTURE = 3
    EVALUATION = 4


def seed_sequence(master_seed: int, cell: CellId, stream: StreamKind) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(cell.row, cell.col, stream.value))


def seed_hierarchy(master_seed: int, cell: CellId, stream: StreamKind) -> np.random.Generator:
    """Generator for one (cell, stream) pair; equal inputs give equal streams."""
    return np.random.default_rng(seed_sequence(master_seed, cell, stream))
