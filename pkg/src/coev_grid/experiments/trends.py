"""
Experiment Harnesses

Repeated local runs that measure how the method behaves as a whole:
quality against grid size, recovery from an injected generator collapse,
and how communication grows with the grid.
"""

from dataclasses import asdict, dataclass, field
from statistics import median
from typing import Any, Iterable, Optional, Sequence
import logging

import numpy as np
from scipy.stats import mannwhitneyu

from coev_grid.config.settings import ExperimentConfig
from coev_grid.distribution.cell import CellRunner, collapse_generator
from coev_grid.distribution.local import LocalGrid, LocalRun
from coev_grid.grid.topology import CellId, GridSpec, GridTopology, neighborhood_of
from coev_grid.metrics.frechet import frechet_proxy
from coev_grid.metrics.modes import mode_coverage, tvd_to_uniform
from coev_grid.nn.individual import Role
from coev_grid.nn.network import generator_forward
from coev_grid.results.records import IterationRecord

logger = logging.getLogger(__name__)

GridSize = tuple[int, int]


def sized_config(
    base: ExperimentConfig,
    rows: int,
    cols: int,
    seed: int,
    iterations: Optional[int] = None,
) -> ExperimentConfig:
    """Copy of base on another grid and seed; the tournament shrinks to fit tiny grids."""
    members = len(neighborhood_of(GridSpec(rows, cols), CellId(0, 0), base.grid.neighborhood_size))
    run = {"seed": seed}
    if iterations is not None:
        run["iterations"] = iterations
    return base.with_overrides(
        run=run,
        grid={"rows": rows, "cols": cols},
        coev={"tournament_size": min(base.coev.tournament_size, members)},
    )


@dataclass(frozen=True)
class RunOutcome:
    """Final quality of the winning mixture of one run."""
    rows: int
    cols: int
    seed: int
    score: float
    frechet_proxy: float
    tvd: float
    mode_coverage: int


def winner_outcome(run: LocalRun, config: ExperimentConfig) -> RunOutcome:
    """Score the winner's samples against its own reference sample."""
    if run.report.winner is None:
        raise RuntimeError("Run produced no ranked mixture")
    cell = CellId.parse(run.report.winner)
    result = run.results[cell]
    runner = run.runners[cell]
    samples = result.samples
    return RunOutcome(
        rows=config.grid.rows,
        cols=config.grid.cols,
        seed=config.run.seed,
        score=float(result.score),
        frechet_proxy=frechet_proxy(samples, runner.real_samples),
        tvd=tvd_to_uniform(samples, runner.dist),
        mode_coverage=mode_coverage(samples, runner.dist, config.metrics.coverage_min_fraction),
    )


@dataclass
class TrendResult:
    """Outcomes of every (grid size, seed) run."""
    outcomes: list[RunOutcome] = field(default_factory=list)

    def sizes(self) -> list[GridSize]:
        return sorted({(o.rows, o.cols) for o in self.outcomes}, key=lambda s: s[0] * s[1])

    def values(self, size: GridSize, metric: str) -> list[float]:
        return [getattr(o, metric) for o in self.outcomes if (o.rows, o.cols) == size]

    def medians(self, metric: str) -> dict[GridSize, float]:
        return {size: float(median(self.values(size, metric))) for size in self.sizes()}

    def strictly_decreasing(self, metric: str) -> bool:
        values = list(self.medians(metric).values())
        return all(a > b for a, b in zip(values, values[1:]))

    def non_decreasing(self, metric: str) -> bool:
        values = list(self.medians(metric).values())
        return all(a <= b for a, b in zip(values, values[1:]))

    def rank_sum_p_value(self, metric: str = "frechet_proxy") -> float:
        """One-sided test that the smallest grid scores higher than the largest."""
        sizes = self.sizes()
        smallest, largest = self.values(sizes[0], metric), self.values(sizes[-1], metric)
        return float(mannwhitneyu(smallest, largest, alternative="greater").pvalue)

    def to_dict(self) -> dict[str, Any]:
        return {
            "outcomes": [asdict(o) for o in self.outcomes],
            "medians": {
                metric: {f"{r}x{c}": v for (r, c), v in self.medians(metric).items()}
                for metric in ("frechet_proxy", "tvd", "mode_coverage")
            },
        }


async def grid_size_trend(
    base: ExperimentConfig,
    sizes: Sequence[GridSize] = ((1, 1), (2, 2), (3, 3)),
    seeds: Iterable[int] = range(15),
    iterations: Optional[int] = None,
) -> TrendResult:
    """
    Run every grid size with every seed and collect the winners' quality.

    Args:
        base: Configuration shared by all runs.
        sizes: Grid sizes, smallest first.
        seeds: Master seeds.
        iterations: Iterations per run; defaults to base.run.iterations.

    Returns:
        Outcomes of all runs.
    """
    trend = TrendResult()
    for seed in list(seeds):
        for rows, cols in sizes:
            config = sized_config(base, rows, cols, seed, iterations)
            run = await LocalGrid(config, schedule="lockstep").run()
            outcome = winner_outcome(run, config)
            logger.info(
                f"Trend {rows}x{cols} seed {seed}: fid {outcome.frechet_proxy:.4f}, "
                f"tvd {outcome.tvd:.4f}, coverage {outcome.mode_coverage}"
            )
            trend.outcomes.append(outcome)
    return trend


def generator_coverage(
    runner: CellRunner,
    n_samples: int,
    rng: np.random.Generator,
) -> int:
    """Mode coverage of the cell's own published generator."""
    generator = runner.snapshot.generator
    latents = rng.normal(0.0, 1.0, size=(n_samples, generator.shape.input_dim))
    samples = generator_forward(generator.params, generator.shape, latents) * runner.dist.extent
    return mode_coverage(samples, runner.dist, runner.config.metrics.coverage_min_fraction)


@dataclass
class RecoveryOutcome:
    """How one cell fared after its generator was collapsed."""
    seed: int
    cell: CellId
    pre_coverage: int
    coverage: dict[int, int] = field(default_factory=dict)
    replaced_at: Optional[int] = None
    recovered_at: Optional[int] = None

    @property
    def recovered(self) -> bool:
        return self.recovered_at is not None


@dataclass
class RecoveryResult:
    outcomes: list[RecoveryOutcome] = field(default_factory=list)

    @property
    def recovered_count(self) -> int:
        return sum(o.recovered for o in self.outcomes)


async def collapse_recovery(
    base: ExperimentConfig,
    seeds: Iterable[int] = range(15),
    inject_at: int = 50,
    window: int = 25,
    cell: CellId = CellId(0, 0),
    rows: int = 2,
    cols: int = 2,
) -> RecoveryResult:
    """
    Collapse one cell's generator mid-run and watch it recover.

    A seed recovers when, within window iterations after the injection, the
    cell's generator has been replaced and its mode coverage is back at its
    pre-injection level.
    """
    result = RecoveryResult()
    for seed in list(seeds):
        config = sized_config(base, rows, cols, seed, inject_at + window)
        rng = np.random.default_rng(seed)
        n_samples = config.mixture.n_samples
        outcome = RecoveryOutcome(seed=seed, cell=cell, pre_coverage=0)

        def watch(runner: CellRunner, record: IterationRecord) -> None:
            if runner.cell != cell:
                return
            if record.iteration == inject_at - 1:
                outcome.pre_coverage = generator_coverage(runner, n_samples, rng)
            if record.iteration < inject_at:
                return
            coverage = generator_coverage(runner, n_samples, rng)
            outcome.coverage[record.iteration] = coverage
            replaced = any(
                event.role is Role.GENERATOR and event.iteration >= inject_at
                for event in runner.replacements
            )
            if replaced and outcome.replaced_at is None:
                outcome.replaced_at = record.iteration
            if (
                replaced
                and outcome.recovered_at is None
                and coverage >= outcome.pre_coverage
            ):
                outcome.recovered_at = record.iteration

        grid = LocalGrid(
            config,
            schedule="lockstep",
            interventions={cell: {inject_at: collapse_generator}},
            on_iteration=watch,
        )
        await grid.run()
        logger.info(
            f"Collapse seed {seed}: pre coverage {outcome.pre_coverage}, "
            f"replaced at {outcome.replaced_at}, recovered at {outcome.recovered_at}"
        )
        result.outcomes.append(outcome)
    return result


@dataclass(frozen=True)
class ScalingPoint:
    """Communication of one grid size."""
    rows: int
    cols: int
    cells: int
    max_fetches_per_cell_iteration: int
    messages_per_iteration: dict[int, int]
    expected_messages_per_iteration: int
    mean_iteration_seconds: float


async def communication_scaling(
    base: ExperimentConfig,
    sizes: Sequence[GridSize] = ((1, 1), (2, 2), (3, 3), (4, 4)),
    iterations: int = 5,
    seed: int = 0,
    schedule: str = "async",
) -> list[ScalingPoint]:
    """Count neighbor fetches and iteration time for each grid size."""
    points = []
    for rows, cols in sizes:
        config = sized_config(base, rows, cols, seed, iterations)
        run = await LocalGrid(config, schedule=schedule).run()
        topology = GridTopology(config.grid_spec, config.grid.neighborhood_size)
        records = [r for result in run.results.values() for r in result.history]
        point = ScalingPoint(
            rows=rows,
            cols=cols,
            cells=config.grid_spec.size,
            max_fetches_per_cell_iteration=run.communication.max_fetches_per_cell_iteration,
            messages_per_iteration=dict(run.communication.messages_per_iteration),
            expected_messages_per_iteration=topology.fetches_per_round(),
            mean_iteration_seconds=(
                sum(r.iteration_seconds for r in records) / len(records) if records else 0.0
            ),
        )
        logger.info(
            f"Scaling {rows}x{cols}: max {point.max_fetches_per_cell_iteration} fetches per "
            f"cell-iteration, {point.mean_iteration_seconds:.3f}s per iteration"
        )
        points.append(point)
    return points
