"""
Pairwise Evaluation

All-vs-all GAN loss inside a neighborhood and the fitness it induces.
Fitness is higher-is-better for both roles: a discriminator scores
-mean(L) over its pairings, a generator scores +mean(L).
"""

from typing import Sequence
import logging

import numpy as np

from coev_grid.coev.population import Neighborhood
from coev_grid.errors import NumericError
from coev_grid.nn.individual import Individual, evaluate_pair
from coev_grid.nn.loss import PROBABILITY_EPSILON

logger = logging.getLogger(__name__)


def pair_losses(
    generators: Sequence[Individual],
    discriminators: Sequence[Individual],
    batch: np.ndarray,
    latents: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> np.ndarray:
    """Loss matrix with entry [i, j] = L(generators[i], discriminators[j])."""
    losses = np.empty((len(generators), len(discriminators)))
    for i, generator in enumerate(generators):
        for j, discriminator in enumerate(discriminators):
            try:
                losses[i, j] = evaluate_pair(generator, discriminator, batch, latents, epsilon)
            except NumericError as e:
                raise NumericError(
                    f"Evaluating pair (G{i} from {generator.source_cell}, "
                    f"D{j} from {discriminator.source_cell}) failed: {e}",
                    cell=e.cell,
                    iteration=e.iteration,
                ) from e
    return losses


def generator_fitness(losses: np.ndarray) -> np.ndarray:
    return losses.mean(axis=1)


def discriminator_fitness(losses: np.ndarray) -> np.ndarray:
    return -losses.mean(axis=0)


def evaluate_all_pairs(
    nbh: Neighborhood,
    batch: np.ndarray,
    latents: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> Neighborhood:
    """
    Evaluate every (G, D) pair on one batch and assign fitness.

    Args:
        nbh: Neighborhood to evaluate.
        batch: Real samples in model space.
        latents: Latent vectors shared by every pairing.
        epsilon: Probability clamp.

    Returns:
        The neighborhood with fitness set on every individual.
    """
    losses = pair_losses(nbh.generators, nbh.discriminators, batch, latents, epsilon)
    fit_g = generator_fitness(losses)
    fit_d = discriminator_fitness(losses)
    logger.debug(
        f"Evaluated {losses.size} pairs around {nbh.center_cell}: "
        f"mean loss {losses.mean():.4f}"
    )
    return nbh.with_populations(
        tuple(g.with_fitness(float(f)) for g, f in zip(nbh.generators, fit_g)),
        tuple(d.with_fitness(float(f)) for d, f in zip(nbh.discriminators, fit_d)),
    )
