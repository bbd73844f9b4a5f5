"""
Selection and Mutation

Tournament selection, Gaussian learning-rate mutation and weighted
opponent sampling.
"""

from typing import Sequence, Union

import numpy as np

from coev_grid.errors import SelectionError
from coev_grid.mixture.weights import MixtureWeights
from coev_grid.nn.individual import Individual

MIN_LEARNING_RATE = 1e-6
MAX_LEARNING_RATE = 1.0

WeightsLike = Union[MixtureWeights, Sequence[float], np.ndarray]


def tournament_select(
    individuals: Sequence[Individual],
    tournament_size: int,
    rng: np.random.Generator,
) -> list[Individual]:
    """
    Fill every slot with the fittest of tournament_size uniform draws.

    Draws are with replacement; among equal fitnesses the earliest draw wins.

    Args:
        individuals: Population with fitness set on every member.
        tournament_size: Draws per tournament, 1 <= tau <= len(individuals).
        rng: Random generator.

    Returns:
        A population of the same length; slot 0 is filled first.
    """
    n = len(individuals)
    if n == 0:
        raise SelectionError("Cannot select from an empty population")
    if not 1 <= tournament_size <= n:
        raise SelectionError(f"Tournament size {tournament_size} outside [1, {n}]")
    if any(ind.fitness is None for ind in individuals):
        raise SelectionError("Every individual needs a fitness before selection")

    fitness = np.array([ind.fitness for ind in individuals], dtype=np.float64)
    draws = rng.integers(0, n, size=(n, tournament_size))
    winners = [int(row[np.argmax(fitness[row])]) for row in draws]
    return [individuals[i] for i in winners]


def mutate_learning_rate(
    learning_rate: float,
    probability: float,
    scale: float,
    rng: np.random.Generator,
) -> float:
    """With the given probability, add N(0, scale^2) and clamp to [1e-6, 1]."""
    if rng.random() >= probability or scale == 0:
        return learning_rate
    mutated = learning_rate + rng.normal(0.0, scale)
    return float(np.clip(mutated, MIN_LEARNING_RATE, MAX_LEARNING_RATE))


def _probabilities(weights: WeightsLike, n: int) -> np.ndarray:
    values = weights.values if isinstance(weights, MixtureWeights) else np.asarray(weights, float)
    if values.shape != (n,):
        raise SelectionError(f"{values.size} weights for {n} opponents")
    total = values.sum()
    if not np.isfinite(total) or total <= 0 or np.any(values < 0):
        raise SelectionError(f"Opponent weights cannot be normalized: {values}")
    return values / total


def draw_opponent_index(n: int, weights: WeightsLike, rng: np.random.Generator) -> int:
    """Slot index drawn with probability proportional to its weight."""
    return int(rng.choice(n, p=_probabilities(weights, n)))


def get_random_opponent(
    opponents: Sequence[Individual],
    weights: WeightsLike,
    rng: np.random.Generator,
) -> Individual:
    """Opponent i drawn with probability weights[i]."""
    if not opponents:
        raise SelectionError("No opponents to draw from")
    return opponents[draw_opponent_index(len(opponents), weights, rng)]
