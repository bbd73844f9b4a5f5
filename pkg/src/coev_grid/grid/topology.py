"""
Grid Topology

Toroidal grid addressing and von Neumann neighborhoods for the spatial
coevolution. The torus is held as a networkx graph so grid-level questions
(symmetry, overlap, message counts) are graph queries.
"""

from dataclasses import dataclass
from typing import Any, Iterator
import logging

import networkx as nx

logger = logging.getLogger(__name__)

SUPPORTED_NEIGHBORHOOD_SIZES = (1, 5)


@dataclass(frozen=True, order=True)
class CellId:
    """Address of one grid cell."""
    row: int
    col: int

    def __str__(self) -> str:
        return f"{self.row},{self.col}"

    def to_dict(self) -> dict[str, int]:
        return {"row": self.row, "col": self.col}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CellId":
        return cls(row=int(data["row"]), col=int(data["col"]))

    @classmethod
    def parse(cls, text: str) -> "CellId":
        """Parse the ``"row,col"`` form used as JSON object keys."""
        row, col = text.split(",")
        return cls(row=int(row), col=int(col))


@dataclass(frozen=True)
class GridSpec:
    """Grid dimensions."""
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"Grid dimensions must be >= 1, got {self.rows}x{self.cols}")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def contains(self, cell: CellId) -> bool:
        return 0 <= cell.row < self.rows and 0 <= cell.col < self.cols

    def cells(self) -> Iterator[CellId]:
        """Iterate cells in row-major order."""
        for row in range(self.rows):
            for col in range(self.cols):
                yield CellId(row, col)

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Ordered neighborhood membership; the center is always first."""
    size: int
    member_ids: tuple[CellId, ...]

    @property
    def center(self) -> CellId:
        return self.member_ids[0]

    @property
    def neighbors(self) -> tuple[CellId, ...]:
        return self.member_ids[1:]

    def __len__(self) -> int:
        return len(self.member_ids)


def neighborhood_of(grid: GridSpec, cell: CellId, size: int = 5) -> NeighborhoodSpec:
    """
    Build the von Neumann neighborhood of a cell on the torus.

    Members are ordered center, up, down, left, right; wrap-around duplicates
    keep their first occurrence only.

    Args:
        grid: Grid dimensions.
        cell: Center cell.
        size: Neighborhood size k; only 5 and 1 are implemented.

    Returns:
        NeighborhoodSpec with distinct members.
    """
    if size not in SUPPORTED_NEIGHBORHOOD_SIZES:
        raise ValueError(
            f"Neighborhood size {size} is not supported "
            f"(expected one of {SUPPORTED_NEIGHBORHOOD_SIZES})"
        )
    if not grid.contains(cell):
        raise ValueError(f"Cell {cell} is outside grid {grid}")

    if size == 1:
        return NeighborhoodSpec(size=size, member_ids=(cell,))

    candidates = [
        cell,
        CellId((cell.row - 1) % grid.rows, cell.col),
        CellId((cell.row + 1) % grid.rows, cell.col),
        CellId(cell.row, (cell.col - 1) % grid.cols),
        CellId(cell.row, (cell.col + 1) % grid.cols),
    ]
    members: list[CellId] = []
    for candidate in candidates:
        if candidate not in members:
            members.append(candidate)
    return NeighborhoodSpec(size=size, member_ids=tuple(members))


class GridTopology:
    """
    Graph view of a toroidal grid.

    Features:
    - Neighborhood lookup for every cell
    - Membership symmetry and overlap queries
    - Message accounting for one round of neighbor fetches
    """

    def __init__(self, grid: GridSpec, neighborhood_size: int = 5):
        """
        Initialize the topology.

        Args:
            grid: Grid dimensions.
            neighborhood_size: Neighborhood size k (5 or 1).
        """
        self.grid = grid
        self.neighborhood_size = neighborhood_size
        # networkx only adds wrap edges along dimensions longer than 2,
        # which is exactly the duplicate collapse on small grids.
        self._graph = nx.grid_2d_graph(grid.rows, grid.cols, periodic=True)
        self._graph.remove_edges_from(list(nx.selfloop_edges(self._graph)))
        if neighborhood_size == 1:
            self._graph.remove_edges_from(list(self._graph.edges))
        self._neighborhoods = {
            cell: neighborhood_of(grid, cell, neighborhood_size) for cell in grid.cells()
        }

        for cell, spec in self._neighborhoods.items():
            graph_members = {CellId(*node) for node in self._graph.neighbors((cell.row, cell.col))}
            if graph_members != set(spec.neighbors):
                raise RuntimeError(f"Neighborhood of {cell} disagrees with the grid graph")

    def neighborhood(self, cell: CellId) -> NeighborhoodSpec:
        """Get the neighborhood of a cell."""
        return self._neighborhoods[cell]

    def cells(self) -> list[CellId]:
        return list(self.grid.cells())

    def memberships(self, cell: CellId) -> int:
        """Number of neighborhoods (including its own) that contain a cell."""
        return sum(1 for spec in self._neighborhoods.values() if cell in spec.member_ids)

    def shared_members(self, a: CellId, b: CellId) -> set[CellId]:
        """Cells present in both neighborhoods."""
        return set(self._neighborhoods[a].member_ids) & set(self._neighborhoods[b].member_ids)

    def is_symmetric(self) -> bool:
        """Check that a is in neighborhood(b) exactly when b is in neighborhood(a)."""
        for a, spec in self._neighborhoods.items():
            for b in spec.member_ids:
                if a not in self._neighborhoods[b].member_ids:
                    return False
        return True

    def fetches_per_round(self) -> int:
        """Neighbor fetches issued when every cell pulls each neighbor once."""
        return 2 * self._graph.number_of_edges()
