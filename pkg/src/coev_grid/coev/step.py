"""
Coevolutionary Step

One training step of a cell: select, mutate, train against sampled
opponents, evaluate and replace the center individuals.

Features:
- Tournament selection over the whole neighborhood for both roles
- Per-batch learning-rate mutation and opponent-sampled gradient updates
- Gaussian mutation of both mixture weight vectors
- Strictly-better replacement of the center, measured on the last batch
- Roll-back to the input neighborhood on numeric failure
"""

from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence
import logging

import numpy as np

from coev_grid.coev.evaluation import (
    discriminator_fitness,
    evaluate_all_pairs,
    generator_fitness,
    pair_losses,
)
from coev_grid.coev.population import CoevParams, Neighborhood
from coev_grid.coev.selection import (
    get_random_opponent,
    mutate_learning_rate,
    tournament_select,
)
from coev_grid.data.distributions import Minibatch
from coev_grid.errors import NumericError, ShapeError
from coev_grid.grid.topology import CellId
from coev_grid.mixture.weights import mutate_weights
from coev_grid.nn.individual import Individual, Role, apply_update, compute_gradients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplacementEvent:
    """The center individual of one role was replaced."""
    role: Role
    cell: CellId
    iteration: int
    incumbent_fitness: float
    replacement_fitness: float
    replacement_source: CellId

    def to_dict(self) -> dict[str, Any]:
        return {
            "role": self.role.value,
            "cell": str(self.cell),
            "iteration": self.iteration,
            "incumbent_fitness": self.incumbent_fitness,
            "replacement_fitness": self.replacement_fitness,
            "replacement_source": str(self.replacement_source),
        }


@dataclass(frozen=True, eq=False)
class StepResult:
    """Outcome of :func:`step_gan_coev`."""
    neighborhood: Neighborhood
    replacements: tuple[ReplacementEvent, ...] = ()
    aborted: bool = False
    error: Optional[str] = None
    generator_updates: int = 0
    discriminator_updates: int = 0
    incumbent_fitness_g: Optional[float] = None
    incumbent_fitness_d: Optional[float] = None


def _latents(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    return rng.normal(0.0, 1.0, size=(n, dim))


def _mutate_rates(
    population: list[Individual],
    params: CoevParams,
    rng: np.random.Generator,
) -> list[Individual]:
    return [
        replace(
            ind,
            learning_rate=mutate_learning_rate(
                ind.learning_rate, params.mutation_probability, params.lr_mutation_scale, rng
            ),
        )
        for ind in population
    ]


def _train(
    population: list[Individual],
    opponents: list[Individual],
    opponent_weights: Any,
    batch: np.ndarray,
    latents: np.ndarray,
    params: CoevParams,
    rng: np.random.Generator,
) -> list[Individual]:
    trained = []
    for ind in population:
        opponent = get_random_opponent(opponents, opponent_weights, rng)
        gradient = compute_gradients(ind, opponent, batch, latents, params.probability_epsilon)
        trained.append(apply_update(ind, gradient))
    return trained


def _replace_center(
    role: Role,
    incumbent: Individual,
    candidates: list[Individual],
    selected: list[Individual],
    candidate_fitness: np.ndarray,
    incumbent_fitness: float,
    center: CellId,
    iteration: int,
) -> tuple[Individual, Optional[ReplacementEvent]]:
    """Pick the fittest eligible candidate; it wins only if strictly better."""
    eligible = [
        k
        for k, ind in enumerate(candidates)
        if ind.source_cell == center or not ind.same_parameters(selected[k])
    ]
    if eligible:
        best = max(eligible, key=lambda k: candidate_fitness[k])
        best_fitness = float(candidate_fitness[best])
        if best_fitness > incumbent_fitness:
            winner = candidates[best]
            event = ReplacementEvent(
                role=role,
                cell=center,
                iteration=iteration,
                incumbent_fitness=incumbent_fitness,
                replacement_fitness=best_fitness,
                replacement_source=winner.source_cell,
            )
            return (
                replace(winner, fitness=best_fitness, source_cell=center, iteration=iteration),
                event,
            )
    return replace(incumbent, fitness=incumbent_fitness, iteration=iteration), None


def step_gan_coev(
    nbh: Neighborhood,
    params: CoevParams,
    batches: Sequence[Minibatch],
    rng: np.random.Generator,
    iteration: int = 0,
) -> StepResult:
    """
    Run one coevolutionary step on a cell's neighborhood.

    Neighbor individuals are trained as candidates for the center slots only;
    the returned neighborhood differs from the input in its center
    individuals, their fitness and the mutated mixture weights.

    Args:
        nbh: Neighborhood assembled from the latest neighbor snapshots.
        params: Step hyperparameters.
        batches: Training batches in model space; the last one is the
            evaluation batch.
        rng: The cell's training random generator.
        iteration: Iteration number recorded on replaced individuals.

    Returns:
        The step result; on numeric failure the input neighborhood with
        ``aborted`` set.
    """
    if not batches:
        raise ShapeError("step_gan_coev needs at least one batch")
    center = nbh.center_cell
    latent_dim = nbh.center_generator.shape.input_dim
    eps = params.probability_epsilon

    try:
        work = nbh
        if any(ind.fitness is None for ind in (*work.generators, *work.discriminators)):
            first = batches[0].samples
            work = evaluate_all_pairs(work, first, _latents(rng, len(first), latent_dim), eps)

        selected_g = tournament_select(work.generators, params.tournament_size, rng)
        selected_d = tournament_select(work.discriminators, params.tournament_size, rng)
        trained_g, trained_d = list(selected_g), list(selected_d)

        g_updates = d_updates = 0
        for batch_number, batch in enumerate(batches, start=1):
            samples = batch.samples
            trained_g = _mutate_rates(trained_g, params, rng)
            trained_d = _mutate_rates(trained_d, params, rng)
            latents = _latents(rng, len(samples), latent_dim)
            trained_g = _train(trained_g, trained_d, nbh.weights_d, samples, latents, params, rng)
            g_updates += len(trained_g)
            if params.skips_discriminator(batch_number):
                continue
            latents = _latents(rng, len(samples), latent_dim)
            trained_d = _train(trained_d, trained_g, nbh.weights_g, samples, latents, params, rng)
            d_updates += len(trained_d)

        weights_d, weights_g = nbh.weights_d, nbh.weights_g
        if rng.random() < params.mixture_mutation_probability:
            weights_d = mutate_weights(weights_d, params.mixture_mutation_scale, rng)
        if rng.random() < params.mixture_mutation_probability:
            weights_g = mutate_weights(weights_g, params.mixture_mutation_scale, rng)

        evaluation = batches[-1].samples
        latents = _latents(rng, len(evaluation), latent_dim)
        losses = pair_losses(trained_g, trained_d, evaluation, latents, eps)
        incumbent_g, incumbent_d = nbh.center_generator, nbh.center_discriminator
        incumbent_fit_g = float(
            generator_fitness(pair_losses([incumbent_g], trained_d, evaluation, latents, eps))[0]
        )
        incumbent_fit_d = float(
            discriminator_fitness(pair_losses(trained_g, [incumbent_d], evaluation, latents, eps))[0]
        )

        new_g, event_g = _replace_center(
            Role.GENERATOR, incumbent_g, trained_g, selected_g,
            generator_fitness(losses), incumbent_fit_g, center, iteration,
        )
        new_d, event_d = _replace_center(
            Role.DISCRIMINATOR, incumbent_d, trained_d, selected_d,
            discriminator_fitness(losses), incumbent_fit_d, center, iteration,
        )
    except NumericError as e:
        logger.warning(f"Coevolution step aborted at cell {center}, iteration {iteration}: {e}")
        return StepResult(neighborhood=nbh, aborted=True, error=str(e))

    events = tuple(event for event in (event_g, event_d) if event is not None)
    for event in events:
        logger.debug(
            f"Cell {center} iteration {iteration}: {event.role.value} replaced by candidate "
            f"from {event.replacement_source} ({event.incumbent_fitness:.4f} -> "
            f"{event.replacement_fitness:.4f})"
        )

    result = nbh.with_centers(new_g, new_d).with_weights(weights_g, weights_d)
    return StepResult(
        neighborhood=result,
        replacements=events,
        generator_updates=g_updates,
        discriminator_updates=d_updates,
        incumbent_fitness_g=incumbent_fit_g,
        incumbent_fitness_d=incumbent_fit_d,
    )
