"""
Local Grid

Runs a whole grid inside one process over the in-memory board. The lockstep
schedule advances all cells one iteration per round and is deterministic for
a given master seed; the async schedule lets every cell run freely.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union
import asyncio
import logging

from coev_grid.config.settings import ExperimentConfig
from coev_grid.distribution.cell import CellRunner, Intervention, IterationHook, run_cell_loop
from coev_grid.distribution.transport import (
    CommunicationCounter,
    CommunicationReport,
    InMemoryBoard,
)
from coev_grid.errors import CoevGridError
from coev_grid.grid.topology import CellId
from coev_grid.results.records import CellResult, RunReport
from coev_grid.results.writer import ResultsWriter

logger = logging.getLogger(__name__)


@dataclass
class LocalRun:
    """Everything a local run produced."""
    report: RunReport
    results: dict[CellId, CellResult]
    communication: CommunicationReport
    runners: dict[CellId, CellRunner] = field(default_factory=dict)


class LocalGrid:
    """
    A grid of cell runners sharing one in-memory board.

    Features:
    - lockstep and async schedules
    - Kill injection: a cell stops before a given iteration and becomes
      unreachable to its neighbors
    - Snapshot interventions (e.g. generator collapse) at given iterations
    """

    def __init__(
        self,
        config: ExperimentConfig,
        schedule: Optional[str] = None,
        kills: Optional[Mapping[CellId, int]] = None,
        interventions: Optional[Mapping[CellId, Mapping[int, Intervention]]] = None,
        on_iteration: Optional[IterationHook] = None,
        experiment_id: str = "local",
    ):
        self.config = config
        self.schedule = schedule or config.distribution.schedule
        if self.schedule not in ("lockstep", "async"):
            raise ValueError(f"Unknown schedule {self.schedule!r}")
        self.kills = dict(kills or {})
        self.experiment_id = experiment_id
        self.board = InMemoryBoard(lockstep=self.schedule == "lockstep")
        self.counter = CommunicationCounter()
        interventions = interventions or {}
        self.runners = {
            cell: CellRunner(
                config,
                cell,
                self.board,
                self.board.publish,
                counter=self.counter,
                interventions=interventions.get(cell),
                on_iteration=on_iteration,
            )
            for cell in config.grid_spec.cells()
        }

    async def _run_lockstep(self, iterations: int) -> dict[CellId, CellResult]:
        for runner in self.runners.values():
            await runner.start()
        self.board.commit()

        results: dict[CellId, CellResult] = {}
        for iteration in range(1, iterations + 1):
            active = []
            for cell, runner in self.runners.items():
                if cell in results:
                    continue
                if self.kills.get(cell) is not None and iteration >= self.kills[cell]:
                    logger.warning(f"Killing cell {cell} before iteration {iteration}")
                    self.board.kill(cell)
                    results[cell] = runner.result(error=f"killed at iteration {iteration}")
                    continue
                active.append(runner)

            outcomes = await asyncio.gather(
                *(runner.iterate(iteration) for runner in active), return_exceptions=True
            )
            for runner, outcome in zip(active, outcomes):
                if isinstance(outcome, CoevGridError):
                    logger.error(f"Cell {runner.cell} failed: {outcome}")
                    self.board.kill(runner.cell)
                    results[runner.cell] = runner.result(error=str(outcome))
                elif isinstance(outcome, BaseException):
                    raise outcome
            self.board.commit()
            logger.debug(f"Round {iteration} of {iterations} done")

        for cell, runner in self.runners.items():
            if cell not in results:
                results[cell] = runner.result()
        return results

    async def _run_async(self, iterations: int) -> dict[CellId, CellResult]:
        async def run_one(cell: CellId, runner: CellRunner) -> CellResult:
            result = await run_cell_loop(runner, iterations, stop_at=self.kills.get(cell))
            if not result.completed:
                self.board.kill(cell)
            return result

        outcomes = await asyncio.gather(
            *(run_one(cell, runner) for cell, runner in self.runners.items())
        )
        return dict(zip(self.runners, outcomes))

    async def run(
        self,
        iterations: Optional[int] = None,
        output_dir: Optional[Union[str, Path]] = None,
    ) -> LocalRun:
        """
        Run every cell and rank the results.

        Args:
            iterations: Iterations per cell; defaults to run.iterations.
            output_dir: Where artifacts are written; None skips persistence.

        Returns:
            The report, per-cell results and communication statistics.
        """
        total = self.config.run.iterations if iterations is None else iterations
        grid = self.config.grid_spec
        logger.info(f"Local {self.schedule} run of a {grid} grid for {total} iterations")
        if self.schedule == "lockstep":
            results = await self._run_lockstep(total)
        else:
            results = await self._run_async(total)

        communication = self.counter.report()
        report = RunReport.from_results(self.experiment_id, grid.rows, grid.cols, results)
        report.communication = communication.to_dict()
        if output_dir is not None:
            report = ResultsWriter(output_dir).emit_logs(report, results)
        return LocalRun(
            report=report,
            results=dict(sorted(results.items())),
            communication=communication,
            runners=self.runners,
        )


def run_local(
    config: ExperimentConfig,
    output_dir: Optional[Union[str, Path]] = None,
    schedule: Optional[str] = None,
) -> LocalRun:
    """Synchronous entry point for a local run."""
    return asyncio.run(LocalGrid(config, schedule=schedule).run(output_dir=output_dir))
