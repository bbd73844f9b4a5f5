"""
Cell Runner

The training loop of one grid cell: fetch neighbor snapshots, run a
coevolutionary step, score and select the generator mixture, publish.
Cells never synchronize with each other; the same runner serves the HTTP
client and the single-process grid.
"""

from dataclasses import replace
from typing import Awaitable, Callable, Mapping, Optional, Union
import asyncio
import logging
import time

import numpy as np

from coev_grid.coev.step import ReplacementEvent, step_gan_coev
from coev_grid.config.seeding import StreamKind, seed_hierarchy
from coev_grid.config.settings import ExperimentConfig
from coev_grid.data.distributions import get_minibatches
from coev_grid.distribution.snapshot import CellSnapshot
from coev_grid.distribution.transport import (
    CommunicationCounter,
    SnapshotSource,
    fetch_neighbor_snapshots,
)
from coev_grid.errors import CoevGridError, MetricError, NumericError
from coev_grid.grid.topology import CellId, GridTopology
from coev_grid.metrics.diversity import mean_pairwise_distance
from coev_grid.metrics.frechet import frechet_proxy
from coev_grid.metrics.modes import mode_coverage, tvd_to_uniform
from coev_grid.mixture.generators import (
    GeneratorMixture,
    calculate_mixture_measure,
    es_accept,
    sample_mixture,
)
from coev_grid.mixture.weights import MixtureWeights
from coev_grid.nn.individual import Individual, Role
from coev_grid.nn.network import init_parameters
from coev_grid.nn.optim import OptimizerState
from coev_grid.results.records import CellResult, CellStatus, IterationRecord

logger = logging.getLogger(__name__)

Intervention = Callable[[CellSnapshot], CellSnapshot]
Publisher = Callable[[CellSnapshot], Union[None, Awaitable[None]]]
IterationHook = Callable[["CellRunner", IterationRecord], None]


def collapse_generator(snapshot: CellSnapshot) -> CellSnapshot:
    """Zero every parameter of the cell's generator."""
    generator = replace(snapshot.generator, params=np.zeros_like(snapshot.generator.params))
    return replace(snapshot, generator=generator)


class CellRunner:
    """
    Runs one cell of an experiment.

    Features:
    - Seeded initialization from the experiment's master seed
    - Asynchronous fetch / step / publish loop
    - ES-(1+1) survivor selection over generator mixtures
    - Per-iteration metric records and replacement history
    - Fault tolerance for aborted steps, up to a consecutive-failure limit
    """

    def __init__(
        self,
        config: ExperimentConfig,
        cell: CellId,
        source: SnapshotSource,
        publish: Publisher,
        counter: Optional[CommunicationCounter] = None,
        interventions: Optional[Mapping[int, Intervention]] = None,
        on_iteration: Optional[IterationHook] = None,
    ):
        """
        Initialize the cell's state and random streams.

        Args:
            config: Validated experiment configuration.
            cell: The cell this runner owns.
            source: Where neighbor snapshots are read from.
            publish: Called with every new snapshot of this cell.
            counter: Optional communication counter.
            interventions: Snapshot rewrites applied before given iterations.
            on_iteration: Called after every iteration with its record.
        """
        self.config = config
        self.cell = cell
        self.source = source
        self._publish = publish
        self.counter = counter
        self.interventions = dict(interventions or {})
        self.on_iteration = on_iteration

        self.topology = GridTopology(config.grid_spec, config.grid.neighborhood_size)
        self.spec = self.topology.neighborhood(cell)
        self.params = config.coev_params()
        self.dist = config.to_distribution()

        seed = config.run.seed
        self._init_rng = seed_hierarchy(seed, cell, StreamKind.INIT)
        self._data_rng = seed_hierarchy(seed, cell, StreamKind.DATA)
        self._training_rng = seed_hierarchy(seed, cell, StreamKind.TRAINING)
        self._mixture_rng = seed_hierarchy(seed, cell, StreamKind.MIXTURE)
        self._evaluation_rng = seed_hierarchy(seed, cell, StreamKind.EVALUATION)

        self.real_samples = self.dist.sample(config.mixture.n_samples, self._evaluation_rng)
        self.snapshot = self._initial_snapshot()
        self.mixture: Optional[GeneratorMixture] = None
        self.cache: dict[CellId, CellSnapshot] = {}
        self.history: list[IterationRecord] = []
        self.replacements: list[ReplacementEvent] = []
        self.aborted_steps = 0
        self._consecutive_failures = 0

    def _individual(self, role: Role) -> Individual:
        training = self.config.training
        shape = (
            self.config.generator_shape if role is Role.GENERATOR
            else self.config.discriminator_shape
        )
        return Individual(
            role=role,
            shape=shape,
            params=init_parameters(shape, self._init_rng, training.init_range),
            learning_rate=training.initial_learning_rate,
            optimizer=OptimizerState.fresh(
                self.config.optimizer_kind,
                shape.parameter_count,
                beta1=training.beta1,
                beta2=training.beta2,
                epsilon=training.adam_epsilon,
            ),
            source_cell=self.cell,
        )

    def _initial_snapshot(self) -> CellSnapshot:
        size = len(self.spec)
        return CellSnapshot(
            cell=self.cell,
            iteration=0,
            generator=self._individual(Role.GENERATOR),
            discriminator=self._individual(Role.DISCRIMINATOR),
            weights_g=MixtureWeights.uniform(size),
            weights_d=MixtureWeights.uniform(size),
        )

    async def publish(self, snapshot: CellSnapshot) -> None:
        self.snapshot = snapshot
        outcome = self._publish(snapshot)
        if asyncio.iscoroutine(outcome):
            await outcome

    async def start(self) -> None:
        """Publish the initial state."""
        await self.publish(self.snapshot)

    def _score(self, mixture: GeneratorMixture) -> GeneratorMixture:
        return calculate_mixture_measure(
            mixture,
            self.real_samples,
            self.config.mixture.n_samples,
            self.config.mixture_metric,
            self._mixture_rng,
            self.dist,
        )

    def _select_mixture(self, child: GeneratorMixture, iteration: int) -> GeneratorMixture:
        """Score the child mixture and keep it iff it is no worse than the parent."""
        try:
            scored = self._score(child)
        except MetricError as e:
            logger.warning(f"Cell {self.cell} iteration {iteration}: mixture scoring failed ({e})")
            return self.mixture if self.mixture is not None else child
        if self.mixture is None:
            return scored
        survivor, accepted = es_accept(self.mixture, scored)
        logger.debug(
            f"Cell {self.cell} iteration {iteration}: mixture score {scored.score:.5f} "
            f"{'accepted' if accepted else 'rejected'} (parent {self.mixture.score:.5f})"
        )
        return survivor

    def _record(
        self,
        iteration: int,
        mixture: GeneratorMixture,
        generators: tuple[Individual, ...],
        fetches: int,
        stale: int,
        seconds: float,
    ) -> IterationRecord:
        samples = sample_mixture(mixture, self.config.mixture.n_samples, self._evaluation_rng)
        snapshot = self.snapshot
        return IterationRecord(
            iteration=iteration,
            cell=self.cell,
            frechet_proxy=frechet_proxy(samples, self.real_samples),
            tvd=tvd_to_uniform(samples, self.dist),
            mode_coverage=mode_coverage(
                samples, self.dist, self.config.metrics.coverage_min_fraction
            ),
            generator_fitness=snapshot.generator.fitness,
            discriminator_fitness=snapshot.discriminator.fitness,
            learning_rate_g=float(snapshot.generator.learning_rate),
            learning_rate_d=float(snapshot.discriminator.learning_rate),
            mixture_score=self.mixture.score if self.mixture is not None else None,
            generator_diversity=mean_pairwise_distance(generators),
            fetches=fetches,
            stale_neighbors=stale,
            iteration_seconds=seconds,
        )

    async def iterate(self, iteration: int) -> IterationRecord:
        """
        Run one iteration and publish its snapshot.

        Raises:
            NumericError: After max_consecutive_failures aborted steps in a row.
        """
        start = time.perf_counter()
        if iteration in self.interventions:
            logger.info(f"Cell {self.cell}: intervention before iteration {iteration}")
            self.snapshot = self.interventions[iteration](self.snapshot)

        fetch = await fetch_neighbor_snapshots(
            self.spec,
            self.source,
            self.snapshot,
            self.cache,
            timeout=self.config.distribution.fetch_timeout,
            counter=self.counter,
            iteration=iteration,
        )
        batches = get_minibatches(
            self.dist,
            self.config.training.batch_size,
            self.config.training.batches_per_iteration,
            self._data_rng,
            model_space=True,
        )
        result = await asyncio.to_thread(
            step_gan_coev, fetch.neighborhood, self.params, batches, self._training_rng, iteration
        )

        if result.aborted:
            self.aborted_steps += 1
            self._consecutive_failures += 1
            if self._consecutive_failures >= self.config.training.max_consecutive_failures:
                raise NumericError(
                    f"{self._consecutive_failures} consecutive aborted steps: {result.error}",
                    cell=self.cell,
                    iteration=iteration,
                )
        else:
            self._consecutive_failures = 0
        self.replacements.extend(result.replacements)

        nbh = result.neighborhood
        child = GeneratorMixture(
            generators=nbh.generators,
            weights=nbh.weights_g,
            output_scale=self.dist.extent,
        )
        self.mixture = self._select_mixture(child, iteration)

        await self.publish(CellSnapshot(
            cell=self.cell,
            iteration=iteration,
            generator=nbh.center_generator,
            discriminator=nbh.center_discriminator,
            weights_g=self.mixture.weights,
            weights_d=nbh.weights_d,
            mixture_score=self.mixture.score,
        ))

        record = self._record(
            iteration, child, nbh.generators, fetch.fetches, fetch.stale,
            time.perf_counter() - start,
        )
        self.history.append(record)
        logger.debug(
            f"Cell {self.cell} iteration {iteration}: score {record.mixture_score}, "
            f"fid {record.frechet_proxy:.4f}, coverage {record.mode_coverage}"
        )
        if self.on_iteration is not None:
            self.on_iteration(self, record)
        return record

    def final_mixture(self) -> GeneratorMixture:
        """The selected mixture, scoring the initial one for runs without iterations."""
        if self.mixture is None:
            initial = GeneratorMixture(
                generators=(self.snapshot.generator,),
                weights=MixtureWeights.uniform(1),
                output_scale=self.dist.extent,
            )
            self.mixture = self._score(initial)
        return self.mixture

    def result(self, error: Optional[str] = None) -> CellResult:
        """Final result of this cell; a failure when error is given."""
        replacements = [event.to_dict() for event in self.replacements]
        if error is not None:
            return CellResult(
                cell=self.cell,
                status=CellStatus.FAILED,
                history=list(self.history),
                replacements=replacements,
                error=error,
            )
        mixture = self.final_mixture()
        samples = sample_mixture(mixture, self.config.mixture.n_samples, self._evaluation_rng)
        return CellResult(
            cell=self.cell,
            status=CellStatus.COMPLETED,
            mixture=mixture,
            samples=samples,
            history=list(self.history),
            replacements=replacements,
        )


async def run_cell_loop(
    runner: CellRunner,
    iterations: Optional[int] = None,
    stop_at: Optional[int] = None,
) -> CellResult:
    """
    Run a cell from initialization through all iterations.

    Args:
        runner: The cell's runner.
        iterations: Number of iterations; defaults to run.iterations.
        stop_at: Stop abruptly before this iteration, reporting a failure.

    Returns:
        The cell's final result; a failed result on unrecoverable errors.
    """
    total = runner.config.run.iterations if iterations is None else iterations
    await runner.start()
    try:
        for iteration in range(1, total + 1):
            if stop_at is not None and iteration >= stop_at:
                logger.warning(f"Cell {runner.cell} stopped before iteration {iteration}")
                return runner.result(error=f"stopped at iteration {iteration}")
            await runner.iterate(iteration)
    except CoevGridError as e:
        logger.error(f"Cell {runner.cell} failed: {e}")
        return runner.result(error=str(e))
    logger.debug(f"Cell {runner.cell} finished {total} iterations")
    return runner.result()
