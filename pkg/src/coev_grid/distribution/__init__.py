"""Client/master deployment, snapshot transport and the single-process grid."""

from coev_grid.distribution.cell import (
    CellRunner,
    collapse_generator,
    run_cell_loop,
)
from coev_grid.distribution.local import LocalGrid, LocalRun, run_local
from coev_grid.distribution.master import Orchestrator, orchestrate
from coev_grid.distribution.server import ClientRuntime, create_app
from coev_grid.distribution.snapshot import (
    CellSnapshot,
    ClientState,
    ClientStatus,
    ExperimentRequest,
)
from coev_grid.distribution.transport import (
    CommunicationCounter,
    CommunicationReport,
    HttpSnapshotSource,
    InMemoryBoard,
    NeighborFetch,
    count_communication,
    fetch_neighbor_snapshots,
)

__all__ = [
    "CellRunner",
    "CellSnapshot",
    "ClientRuntime",
    "ClientState",
    "ClientStatus",
    "CommunicationCounter",
    "CommunicationReport",
    "ExperimentRequest",
    "HttpSnapshotSource",
    "InMemoryBoard",
    "LocalGrid",
    "LocalRun",
    "NeighborFetch",
    "Orchestrator",
    "collapse_generator",
    "count_communication",
    "create_app",
    "fetch_neighbor_snapshots",
    "orchestrate",
    "run_cell_loop",
    "run_local",
]
