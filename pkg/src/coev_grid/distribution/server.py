"""
Client Server

HTTP endpoints of a client: state, experiment intake, published parameters
and final results. Training runs as a background task on the server's event
loop, so every endpoint stays responsive while the cell trains.

Routes:
- GET  /status                     client state
- POST /experiment                 202 accepted, 409 busy, 400 malformed
- GET  /parameters                 latest full cell snapshot
- GET  /parameters/generators      generator slice of the snapshot
- GET  /parameters/discriminators  discriminator slice of the snapshot
- GET  /results                    final cell result, 404 until finished
"""

from datetime import datetime
from typing import Any, Optional
import asyncio
import json
import logging

import httpx
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from coev_grid import __version__
from coev_grid.distribution.cell import CellRunner, IterationHook, run_cell_loop
from coev_grid.distribution.snapshot import (
    CellSnapshot,
    ClientState,
    ClientStatus,
    ExperimentRequest,
)
from coev_grid.distribution.transport import CommunicationCounter, HttpSnapshotSource
from coev_grid.errors import ConfigError, ProtocolError
from coev_grid.nn.individual import Role
from coev_grid.results.records import CellResult, CellStatus

logger = logging.getLogger(__name__)


class ClientRuntime:
    """State of one client process: its lifecycle, latest snapshot and result."""

    def __init__(
        self,
        on_iteration: Optional[IterationHook] = None,
        transport: Optional[httpx.AsyncBaseTransport] = None,
    ):
        self.state = ClientState()
        self.snapshot: Optional[CellSnapshot] = None
        self.result: Optional[CellResult] = None
        self.counter = CommunicationCounter()
        self.on_iteration = on_iteration
        self.transport = transport
        self._task: Optional[asyncio.Task[None]] = None

    @property
    def busy(self) -> bool:
        return self.state.state is ClientStatus.BUSY

    def accept(self, request: ExperimentRequest) -> bool:
        """Start an experiment; False if one is already running."""
        if self.busy:
            return False
        self.state = ClientState(
            state=ClientStatus.BUSY,
            experiment_id=request.experiment_id,
            cell=request.assigned_cell,
            iteration=0,
            last_experiment_id=self.state.last_experiment_id,
            last_outcome=self.state.last_outcome,
        )
        self.snapshot = None
        self.result = None
        self.counter = CommunicationCounter()
        self._task = asyncio.create_task(self._run(request))
        logger.info(
            f"Accepted experiment {request.experiment_id} for cell {request.assigned_cell}"
        )
        return True

    def _publish(self, snapshot: CellSnapshot) -> None:
        self.snapshot = snapshot
        self.state.iteration = snapshot.iteration
        self.state.last_heartbeat = datetime.now()

    async def _run(self, request: ExperimentRequest) -> None:
        config = request.config
        runner: Optional[CellRunner] = None
        try:
            async with httpx.AsyncClient(transport=self.transport) as client:
                source = HttpSnapshotSource(
                    client,
                    request.neighbor_addresses,
                    timeout=config.distribution.fetch_timeout,
                )
                runner = CellRunner(
                    config,
                    request.assigned_cell,
                    source,
                    self._publish,
                    counter=self.counter,
                    on_iteration=self.on_iteration,
                )
                result = await run_cell_loop(runner)
        except Exception as e:
            logger.exception(f"Experiment {request.experiment_id} failed")
            if runner is not None:
                result = runner.result(error=str(e))
            else:
                result = CellResult(
                    cell=request.assigned_cell, status=CellStatus.FAILED, error=str(e)
                )
        self.result = result
        self.state = ClientState(
            state=ClientStatus.IDLE,
            cell=request.assigned_cell,
            iteration=self.state.iteration,
            last_experiment_id=request.experiment_id,
            last_outcome=result.status.value,
        )
        logger.info(
            f"Experiment {request.experiment_id} cell {request.assigned_cell} "
            f"finished: {result.status.value}"
        )

    async def wait(self) -> None:
        """Wait for the running experiment, if any."""
        if self._task is not None:
            await self._task


def create_app(runtime: Optional[ClientRuntime] = None) -> FastAPI:
    """Build the client's FastAPI application around a runtime."""
    runtime = runtime or ClientRuntime()
    app = FastAPI(title="coev-grid client", version=__version__)
    app.state.runtime = runtime

    @app.get("/status")
    async def status() -> dict[str, Any]:
        runtime.state.last_heartbeat = datetime.now()
        return runtime.state.to_dict()

    @app.post("/experiment", status_code=202)
    async def experiment(request: Request) -> Any:
        try:
            body = json.loads(await request.body())
            parsed = ExperimentRequest.from_dict(body)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise HTTPException(status_code=400, detail=f"Body is not JSON: {e}") from e
        except (ProtocolError, ConfigError) as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        if not runtime.accept(parsed):
            return JSONResponse(
                status_code=409,
                content={
                    "detail": "Client is busy",
                    "experiment_id": runtime.state.experiment_id,
                },
            )
        return {"experiment_id": parsed.experiment_id, "cell": str(parsed.assigned_cell)}

    def latest() -> CellSnapshot:
        if runtime.snapshot is None:
            raise HTTPException(status_code=404, detail="Nothing published yet")
        return runtime.snapshot

    @app.get("/parameters")
    async def parameters() -> dict[str, Any]:
        return latest().to_dict()

    @app.get("/parameters/generators")
    async def generators() -> dict[str, Any]:
        return latest().role_slice(Role.GENERATOR)

    @app.get("/parameters/discriminators")
    async def discriminators() -> dict[str, Any]:
        return latest().role_slice(Role.DISCRIMINATOR)

    @app.get("/results")
    async def results() -> dict[str, Any]:
        if runtime.busy or runtime.result is None:
            raise HTTPException(status_code=404, detail="No finished experiment")
        return {
            "experiment_id": runtime.state.last_experiment_id,
            "result": runtime.result.to_dict(),
            "communication": runtime.counter.report().to_dict(),
        }

    return app
