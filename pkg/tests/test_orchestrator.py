"""Tests for the master orchestrator against in-process clients."""

from typing import Optional

import httpx
import pytest

from coev_grid.distribution.master import Orchestrator
from coev_grid.distribution.server import ClientRuntime, create_app
from coev_grid.errors import ExperimentAborted
from coev_grid.grid.topology import CellId


class RoutingTransport(httpx.AsyncBaseTransport):
    """Routes requests by host:port to in-process client apps."""

    def __init__(self) -> None:
        self.apps: dict[str, httpx.ASGITransport] = {}
        self.down: set[str] = set()

    def add(self, address: str, runtime: ClientRuntime) -> None:
        self.apps[address] = httpx.ASGITransport(app=create_app(runtime))

    async def handle_async_request(self, request: httpx.Request) -> httpx.Response:
        address = f"{request.url.host}:{request.url.port}"
        if address in self.down or address not in self.apps:
            raise httpx.ConnectError(f"{address} unreachable", request=request)
        return await self.apps[address].handle_async_request(request)


class Swarm:
    """A set of client runtimes behind one routing transport."""

    def __init__(self, size: int, kill: Optional[tuple[int, int]] = None):
        self.transport = RoutingTransport()
        self.addresses = [f"10.0.0.{k + 1}:5000" for k in range(size)]
        self.runtimes: list[ClientRuntime] = []
        for index, address in enumerate(self.addresses):
            hook = None
            if kill is not None and kill[0] == index:
                hook = self._killer(address, kill[1])
            runtime = ClientRuntime(on_iteration=hook, transport=self.transport)
            self.runtimes.append(runtime)
            self.transport.add(address, runtime)

    def _killer(self, address: str, at_iteration: int):
        def hook(runner, record):
            if record.iteration == at_iteration:
                self.transport.down.add(address)
                raise RuntimeError(f"client {address} crashed")
        return hook

    def client(self) -> httpx.AsyncClient:
        return httpx.AsyncClient(transport=self.transport)

    async def drain(self) -> None:
        for runtime in self.runtimes:
            await runtime.wait()


def distributed_config(make_config, rows, cols, iterations, **sections):
    distribution = {
        "poll_interval": 0.05,
        "fetch_timeout": 5.0,
        "max_missed_polls": 2,
        "request_retries": 2,
    }
    distribution.update(sections.pop("distribution", {}))
    return make_config(
        run={"iterations": iterations, "seed": 11},
        grid={"rows": rows, "cols": cols},
        distribution=distribution,
        **sections,
    )


class TestOrchestrator:
    """End-to-end runs of the master over in-process clients."""

    async def test_single_cell(self, make_config, tmp_path):
        """Test a 1x1 run producing one ranked result."""
        config = distributed_config(make_config, 1, 1, 3, coev={"tournament_size": 1})
        swarm = Swarm(1)
        async with swarm.client() as client:
            master = Orchestrator(config, swarm.addresses, tmp_path, "exp-single", client=client)
            report = await master.run()
        await swarm.drain()
        assert report.ranking == ["0,0"]
        assert report.winner == "0,0"
        assert report.failures == []
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "winner_samples.txt").exists()

    async def test_ignore_policy_survives_a_crash(self, make_config):
        """Test a 3x3 run where one client dies at iteration 10."""
        config = distributed_config(make_config, 3, 3, 15)
        swarm = Swarm(9, kill=(4, 10))
        async with swarm.client() as client:
            master = Orchestrator(config, swarm.addresses, None, "exp-ignore", client=client)
            report = await master.run()
        await swarm.drain()
        assert len(report.ranking) == 8
        assert "1,1" not in report.ranking
        assert [failure["cell"] for failure in report.failures] == ["1,1"]
        assert report.communication["failed_fetches"] > 0

    async def test_abort_policy(self, make_config):
        """Test that a crash terminates the experiment under the abort policy."""
        config = distributed_config(
            make_config, 2, 2, 6, distribution={"failure_policy": "abort"}
        )
        swarm = Swarm(4, kill=(0, 2))
        async with swarm.client() as client:
            master = Orchestrator(config, swarm.addresses, None, "exp-abort", client=client)
            with pytest.raises(ExperimentAborted):
                await master.run()
            await swarm.drain()

    async def test_unreachable_client(self, make_config):
        """Test that a client never reached is recorded after the retries."""
        config = distributed_config(make_config, 1, 1, 2, coev={"tournament_size": 1})
        swarm = Swarm(1)
        swarm.transport.down.add(swarm.addresses[0])
        async with swarm.client() as client:
            report = await Orchestrator(config, swarm.addresses, client=client).run()
        assert report.ranking == []
        assert "failed after 2 attempts" in report.failures[0]["reason"]

    async def test_unreachable_client_aborts(self, make_config):
        """Test the abort policy on a client that never answers."""
        config = distributed_config(
            make_config, 1, 1, 2,
            coev={"tournament_size": 1},
            distribution={"failure_policy": "abort"},
        )
        swarm = Swarm(1)
        swarm.transport.down.add(swarm.addresses[0])
        async with swarm.client() as client:
            with pytest.raises(ExperimentAborted):
                await Orchestrator(config, swarm.addresses, client=client).run()


class TestRequests:
    """Tests for building per-cell requests."""

    def test_neighbor_addresses(self, make_config):
        """Test that each request names exactly its neighbors' clients."""
        config = make_config(grid={"rows": 3, "cols": 3})
        addresses = [f"host{k}:5000" for k in range(9)]
        requests = Orchestrator(config, addresses).build_requests()
        center = requests[CellId(1, 1)]
        assert center.neighbor_addresses == {
            CellId(0, 1): "host1:5000",
            CellId(2, 1): "host7:5000",
            CellId(1, 0): "host3:5000",
            CellId(1, 2): "host5:5000",
        }
        assert len(requests) == 9

    def test_too_few_clients(self, small_config):
        """Test that every cell needs a client."""
        with pytest.raises(ValueError):
            Orchestrator(small_config, ["a:1", "b:2"])
