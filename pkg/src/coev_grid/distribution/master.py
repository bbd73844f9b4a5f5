"""
Master Orchestrator

Distributes an experiment over a set of clients, monitors them, gathers
their results and ranks the final generator mixtures.

Features:
- One cell per client, neighbor addresses resolved from the grid topology
- Retries with exponential backoff on control requests
- Heartbeat polling with ignore / abort failure policies
- Ranked report and result artifacts written by a single writer
"""

from pathlib import Path
from typing import Any, Optional, Union
import asyncio
import logging

import httpx

from coev_grid.config.settings import ExperimentConfig
from coev_grid.distribution.snapshot import ClientState, ClientStatus, ExperimentRequest
from coev_grid.errors import ExperimentAborted, ProtocolError, TransportError
from coev_grid.grid.topology import CellId, GridTopology
from coev_grid.results.records import CellResult, RunReport
from coev_grid.results.writer import ResultsWriter

logger = logging.getLogger(__name__)


def _base_url(address: str) -> str:
    return address if address.startswith("http") else f"http://{address}"


class Orchestrator:
    """
    Runs one experiment across remote clients.

    Usage:
        async with Orchestrator(config, ["127.0.0.1:5000"], "output") as master:
            report = await master.run()
    """

    def __init__(
        self,
        config: ExperimentConfig,
        client_addresses: list[str],
        output_dir: Optional[Union[str, Path]] = None,
        experiment_id: Optional[str] = None,
        client: Optional[httpx.AsyncClient] = None,
    ):
        """
        Initialize the orchestrator.

        Args:
            config: Experiment configuration sent to every client.
            client_addresses: host:port of each client, at least one per cell.
            output_dir: Where results are written; None skips persistence.
            experiment_id: Identifier; generated when omitted.
            client: HTTP client to use instead of an owned one.
        """
        grid = config.grid_spec
        if len(client_addresses) < grid.size:
            raise ValueError(
                f"A {grid} grid needs {grid.size} clients, got {len(client_addresses)}"
            )
        self.config = config
        self.experiment_id = experiment_id or ExperimentRequest.new_id()
        self.topology = GridTopology(grid, config.grid.neighborhood_size)
        self.assignment: dict[CellId, str] = dict(zip(grid.cells(), client_addresses))
        self.writer = ResultsWriter(output_dir) if output_dir is not None else None
        self.failures: dict[CellId, str] = {}
        self.communication: dict[str, Any] = {}
        self._client = client
        self._owns_client = client is None

    async def __aenter__(self) -> "Orchestrator":
        if self._client is None:
            self._client = httpx.AsyncClient(timeout=self.config.distribution.fetch_timeout)
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb) -> None:
        if self._owns_client and self._client is not None:
            await self._client.aclose()
            self._client = None

    @property
    def client(self) -> httpx.AsyncClient:
        if self._client is None:
            self._client = httpx.AsyncClient(timeout=self.config.distribution.fetch_timeout)
        return self._client

    def build_requests(self) -> dict[CellId, ExperimentRequest]:
        """One experiment request per cell, carrying its neighbors' addresses."""
        requests = {}
        for cell, address in self.assignment.items():
            spec = self.topology.neighborhood(cell)
            requests[cell] = ExperimentRequest(
                experiment_id=self.experiment_id,
                config=self.config,
                assigned_cell=cell,
                neighbor_addresses={n: self.assignment[n] for n in spec.neighbors},
            )
        return requests

    async def _request(
        self,
        method: str,
        address: str,
        path: str,
        body: Optional[dict[str, Any]] = None,
    ) -> httpx.Response:
        """Send a control request, retrying transport errors with backoff."""
        retries = self.config.distribution.request_retries
        last_error: Optional[Exception] = None
        for attempt in range(retries):
            try:
                return await self.client.request(method, f"{_base_url(address)}{path}", json=body)
            except httpx.HTTPError as e:
                last_error = e
                logger.debug(f"{method} {address}{path} attempt {attempt + 1} failed: {e}")
            if attempt < retries - 1:
                await asyncio.sleep(min(2 ** attempt, 8) * 0.1)
        raise TransportError(f"{method} {address}{path} failed after {retries} attempts: {last_error}")

    def _fail(self, cell: CellId, reason: str) -> None:
        if cell in self.failures:
            return
        self.failures[cell] = reason
        if self.config.distribution.failure_policy == "abort":
            raise ExperimentAborted(f"Cell {cell} failed: {reason}")
        logger.warning(f"Ignoring cell {cell} ({self.assignment[cell]}): {reason}")

    async def start(self) -> None:
        """Send every client its experiment request."""
        requests = self.build_requests()

        async def submit(cell: CellId, request: ExperimentRequest) -> None:
            address = self.assignment[cell]
            try:
                response = await self._request("POST", address, "/experiment", request.to_dict())
            except TransportError as e:
                self._fail(cell, str(e))
                return
            if response.status_code != 202:
                self._fail(cell, f"experiment rejected with HTTP {response.status_code}: {response.text}")
                return
            logger.info(f"Cell {cell} started on {address}")

        await asyncio.gather(*(submit(cell, request) for cell, request in requests.items()))

    async def poll(self, cell: CellId) -> Optional[ClientState]:
        """One status poll; None if the client did not answer."""
        try:
            response = await self._request("GET", self.assignment[cell], "/status")
            if response.status_code != 200:
                return None
            return ClientState.from_dict(response.json())
        except (TransportError, ProtocolError, ValueError):
            return None

    def _finished(self, state: ClientState) -> bool:
        return (
            state.state is ClientStatus.IDLE
            and state.last_experiment_id == self.experiment_id
        )

    async def monitor(self) -> None:
        """Poll clients until every live one has finished this experiment."""
        interval = self.config.distribution.poll_interval
        missed: dict[CellId, int] = {cell: 0 for cell in self.assignment}
        pending = {cell for cell in self.assignment if cell not in self.failures}
        while pending:
            states = await asyncio.gather(*(self.poll(cell) for cell in sorted(pending)))
            for cell, state in zip(sorted(pending), states):
                if state is None:
                    missed[cell] += 1
                    logger.warning(f"Cell {cell} missed {missed[cell]} status polls")
                    if missed[cell] >= self.config.distribution.max_missed_polls:
                        self._fail(cell, f"unreachable after {missed[cell]} polls")
                        pending.discard(cell)
                    continue
                missed[cell] = 0
                if self._finished(state):
                    logger.info(f"Cell {cell} finished ({state.last_outcome})")
                    pending.discard(cell)
            if pending:
                progress = ", ".join(str(c) for c in sorted(pending))
                logger.debug(f"Waiting for cells {progress}")
                await asyncio.sleep(interval)

    async def collect(self) -> dict[CellId, CellResult]:
        """Gather the results of every cell that did not fail."""
        results: dict[CellId, CellResult] = {}
        totals: dict[str, int] = {}
        for cell, address in sorted(self.assignment.items()):
            if cell in self.failures:
                continue
            try:
                response = await self._request("GET", address, "/results")
                if response.status_code != 200:
                    self._fail(cell, f"results unavailable (HTTP {response.status_code})")
                    continue
                payload = response.json()
                results[cell] = CellResult.from_dict(payload["result"])
                for key in ("total_messages", "failed_fetches"):
                    totals[key] = totals.get(key, 0) + int(payload["communication"].get(key, 0))
            except (TransportError, ProtocolError, KeyError, ValueError) as e:
                self._fail(cell, f"results could not be read: {e}")
        self.communication = totals
        return results

    async def run(self) -> RunReport:
        """
        Run the experiment end to end.

        Returns:
            The ranked report.

        Raises:
            ExperimentAborted: Under the abort policy, when any cell fails.
        """
        grid = self.config.grid_spec
        logger.info(
            f"Experiment {self.experiment_id}: {grid} grid on {len(self.assignment)} clients"
        )
        await self.start()
        await self.monitor()
        results = await self.collect()

        report = RunReport.from_results(
            self.experiment_id, grid.rows, grid.cols, results, self.failures
        )
        report.communication = dict(self.communication)
        if self.writer is not None:
            report = self.writer.emit_logs(report, results)
        logger.info(
            f"Experiment {self.experiment_id} ranked {len(report.ranking)} mixtures, "
            f"{len(report.failures)} failures, winner {report.winner}"
        )
        return report


async def orchestrate(
    config: ExperimentConfig,
    client_addresses: list[str],
    output_dir: Optional[Union[str, Path]] = None,
    experiment_id: Optional[str] = None,
) -> RunReport:
    """Run one experiment on remote clients and return its ranked report."""
    async with Orchestrator(config, client_addresses, output_dir, experiment_id) as master:
        return await master.run()
