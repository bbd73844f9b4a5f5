"""
Snapshot Transport

How a cell reads its neighbors' published snapshots: an in-memory board for
single-process grids, HTTP for the client/master deployment, and the
communication counter both feed.

Features:
- Pull-only reads of the newest published snapshot per neighbor
- Per-neighbor timeout with stale-cache and local fallback
- Message, byte and latency accounting per cell and iteration
"""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Optional, Protocol
import asyncio
import logging
import time

import httpx

from coev_grid.coev.population import Neighborhood
from coev_grid.distribution.snapshot import CellSnapshot
from coev_grid.errors import ProtocolError, TransportError
from coev_grid.grid.topology import CellId, NeighborhoodSpec

logger = logging.getLogger(__name__)


class SnapshotSource(Protocol):
    """Anything that returns the newest published snapshot of a cell."""

    async def fetch(self, cell: CellId) -> CellSnapshot:
        ...


class CommunicationCounter:
    """Records every neighbor fetch a cell issues."""

    def __init__(self) -> None:
        self._fetches: dict[tuple[CellId, int], int] = defaultdict(int)
        self._failures: dict[tuple[CellId, int], int] = defaultdict(int)
        self._bytes: dict[tuple[CellId, int], int] = defaultdict(int)
        self._seconds: list[float] = []

    def record(
        self,
        cell: CellId,
        iteration: int,
        nbytes: int = 0,
        seconds: float = 0.0,
        ok: bool = True,
    ) -> None:
        key = (cell, iteration)
        self._fetches[key] += 1
        self._bytes[key] += nbytes
        if ok:
            self._seconds.append(seconds)
        else:
            self._failures[key] += 1

    def fetches(self, cell: CellId, iteration: int) -> int:
        return self._fetches.get((cell, iteration), 0)

    def report(self) -> "CommunicationReport":
        return count_communication(self)


@dataclass
class CommunicationReport:
    """Message statistics of one run."""
    per_cell_iteration: dict[tuple[CellId, int], int] = field(default_factory=dict)
    messages_per_iteration: dict[int, int] = field(default_factory=dict)
    bytes_per_iteration: dict[int, int] = field(default_factory=dict)
    failed_fetches: int = 0
    mean_fetch_seconds: float = 0.0

    @property
    def max_fetches_per_cell_iteration(self) -> int:
        return max(self.per_cell_iteration.values(), default=0)

    @property
    def total_messages(self) -> int:
        return sum(self.messages_per_iteration.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_fetches_per_cell_iteration": self.max_fetches_per_cell_iteration,
            "messages_per_iteration": {str(k): v for k, v in self.messages_per_iteration.items()},
            "bytes_per_iteration": {str(k): v for k, v in self.bytes_per_iteration.items()},
            "total_messages": self.total_messages,
            "failed_fetches": self.failed_fetches,
            "mean_fetch_seconds": self.mean_fetch_seconds,
        }


def count_communication(counter: CommunicationCounter) -> CommunicationReport:
    """Aggregate a counter into per-cell and per-iteration message counts."""
    messages: dict[int, int] = defaultdict(int)
    nbytes: dict[int, int] = defaultdict(int)
    for (_, iteration), count in counter._fetches.items():
        messages[iteration] += count
    for (_, iteration), size in counter._bytes.items():
        nbytes[iteration] += size
    seconds = counter._seconds
    return CommunicationReport(
        per_cell_iteration=dict(counter._fetches),
        messages_per_iteration=dict(sorted(messages.items())),
        bytes_per_iteration=dict(sorted(nbytes.items())),
        failed_fetches=sum(counter._failures.values()),
        mean_fetch_seconds=sum(seconds) / len(seconds) if seconds else 0.0,
    )


class InMemoryBoard:
    """
    Published snapshots of every cell of a single-process grid.

    In lockstep mode readers see the state committed at the end of the
    previous round; otherwise they see the newest publish.
    """

    def __init__(self, lockstep: bool = False):
        self.lockstep = lockstep
        self._live: dict[CellId, CellSnapshot] = {}
        self._committed: dict[CellId, CellSnapshot] = {}
        self._killed: set[CellId] = set()

    def publish(self, snapshot: CellSnapshot) -> None:
        previous = self._live.get(snapshot.cell)
        if previous is not None and snapshot.iteration < previous.iteration:
            raise ValueError(
                f"Cell {snapshot.cell} published iteration {snapshot.iteration} "
                f"after {previous.iteration}"
            )
        self._live[snapshot.cell] = snapshot

    def commit(self) -> None:
        self._committed = dict(self._live)

    def kill(self, cell: CellId) -> None:
        self._killed.add(cell)

    def is_killed(self, cell: CellId) -> bool:
        return cell in self._killed

    def latest(self, cell: CellId) -> Optional[CellSnapshot]:
        board = self._committed if self.lockstep else self._live
        return board.get(cell)

    async def fetch(self, cell: CellId) -> CellSnapshot:
        if cell in self._killed:
            raise TransportError(f"Cell {cell} is unreachable")
        snapshot = self.latest(cell)
        if snapshot is None:
            raise TransportError(f"Cell {cell} has not published yet")
        return snapshot


class HttpSnapshotSource:
    """Fetches neighbor snapshots from their clients' GET /parameters route."""

    def __init__(
        self,
        client: httpx.AsyncClient,
        addresses: dict[CellId, str],
        timeout: float = 5.0,
    ):
        self.client = client
        self.addresses = addresses
        self.timeout = timeout
        self.sizes: dict[CellId, int] = {}

    def url(self, cell: CellId) -> str:
        address = self.addresses[cell]
        base = address if address.startswith("http") else f"http://{address}"
        return f"{base}/parameters"

    async def fetch(self, cell: CellId) -> CellSnapshot:
        if cell not in self.addresses:
            raise TransportError(f"No address for cell {cell}")
        try:
            response = await self.client.get(self.url(cell), timeout=self.timeout)
        except httpx.HTTPError as e:
            raise TransportError(f"Fetching {cell} from {self.addresses[cell]} failed: {e}") from e
        if response.status_code != 200:
            raise TransportError(f"Cell {cell} answered HTTP {response.status_code}")
        self.sizes[cell] = len(response.content)
        try:
            return CellSnapshot.from_dict(response.json())
        except ValueError as e:
            raise ProtocolError(f"Cell {cell} sent an unreadable snapshot: {e}") from e


@dataclass(frozen=True, eq=False)
class NeighborFetch:
    """Neighborhood assembled from one round of fetches."""
    neighborhood: Neighborhood
    snapshots: tuple[Optional[CellSnapshot], ...]
    fetches: int = 0
    stale: int = 0
    fallbacks: int = 0


async def fetch_neighbor_snapshots(
    spec: NeighborhoodSpec,
    source: SnapshotSource,
    local: CellSnapshot,
    cache: dict[CellId, CellSnapshot],
    timeout: float = 5.0,
    counter: Optional[CommunicationCounter] = None,
    iteration: int = 0,
) -> NeighborFetch:
    """
    Assemble a neighborhood from the newest reachable neighbor snapshots.

    An unreachable neighbor contributes its last cached snapshot; a neighbor
    never seen contributes the local cell's own individuals. The center slot
    and both weight vectors always come from the local snapshot.

    Args:
        spec: Neighborhood of the local cell.
        source: Where snapshots are read from.
        local: The local cell's current snapshot.
        cache: Last successful snapshot per neighbor, updated in place.
        timeout: Upper bound per neighbor fetch, in seconds.
        counter: Optional communication counter.
        iteration: Iteration the fetch belongs to.

    Returns:
        The assembled neighborhood and fetch statistics.
    """

    async def fetch_one(cell: CellId) -> Optional[CellSnapshot]:
        start = time.perf_counter()
        try:
            snapshot = await asyncio.wait_for(source.fetch(cell), timeout)
        except (TransportError, ProtocolError, asyncio.TimeoutError) as e:
            if counter is not None:
                counter.record(local.cell, iteration, ok=False)
            logger.warning(f"Cell {local.cell} iteration {iteration}: neighbor {cell} unavailable ({e})")
            return None
        if counter is not None:
            counter.record(
                local.cell,
                iteration,
                nbytes=getattr(source, "sizes", {}).get(cell, 0),
                seconds=time.perf_counter() - start,
            )
        return snapshot

    neighbors = spec.neighbors
    fetched = await asyncio.gather(*(fetch_one(cell) for cell in neighbors))

    stale = fallbacks = 0
    snapshots: list[Optional[CellSnapshot]] = [local]
    for cell, snapshot in zip(neighbors, fetched):
        if snapshot is not None:
            cache[cell] = snapshot
        elif cell in cache:
            snapshot = cache[cell]
            stale += 1
            logger.warning(
                f"Cell {local.cell} iteration {iteration}: using cached snapshot of {cell} "
                f"from iteration {snapshot.iteration}"
            )
        else:
            fallbacks += 1
        snapshots.append(snapshot)

    if neighbors and fallbacks == len(neighbors):
        logger.warning(f"Cell {local.cell} iteration {iteration}: no neighbors reachable, training locally")

    generators = [local.generator]
    discriminators = [local.discriminator]
    for snapshot in snapshots[1:]:
        generators.append(local.generator if snapshot is None else snapshot.generator)
        discriminators.append(local.discriminator if snapshot is None else snapshot.discriminator)

    neighborhood = Neighborhood(
        generators=tuple(generators),
        discriminators=tuple(discriminators),
        weights_g=local.weights_g,
        weights_d=local.weights_d,
        spec=spec,
    )
    return NeighborFetch(
        neighborhood=neighborhood,
        snapshots=tuple(snapshots),
        fetches=len(neighbors),
        stale=stale,
        fallbacks=fallbacks,
    )
