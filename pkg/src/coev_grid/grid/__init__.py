"""Toroidal grid topology and neighborhoods."""

from coev_grid.grid.topology import (
    CellId,
    GridSpec,
    GridTopology,
    NeighborhoodSpec,
    neighborhood_of,
)

__all__ = [
    "CellId",
    "GridSpec",
    "GridTopology",
    "NeighborhoodSpec",
    "neighborhood_of",
]
