"""
Generator Mixtures

Weighted ensembles of a neighborhood's generators, sampling, scoring and
ES-(1+1) evolution of the weights.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Optional
import logging
import math

import numpy as np

from coev_grid.data.distributions import SyntheticDistribution
from coev_grid.errors import MetricError
from coev_grid.metrics.frechet import frechet_proxy
from coev_grid.metrics.modes import tvd_to_uniform
from coev_grid.mixture.weights import MixtureWeights, mutate_weights
from coev_grid.nn.individual import Individual, Role
from coev_grid.nn.network import generator_forward

logger = logging.getLogger(__name__)

MIN_FAKE_SAMPLES = 100


class MixtureMetric(Enum):
    """Mixture scores; lower is better for all of them."""
    FRECHET_PROXY = "frechet_proxy"
    TVD = "tvd"


@dataclass(frozen=True, eq=False)
class GeneratorMixture:
    """Generators, their weights, and the mixture's last score."""
    generators: tuple[Individual, ...]
    weights: MixtureWeights
    score: Optional[float] = None
    output_scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(self.generators) != len(self.weights):
            raise ValueError(
                f"{len(self.generators)} generators but {len(self.weights)} weights"
            )
        if any(g.role is not Role.GENERATOR for g in self.generators):
            raise ValueError("A generator mixture may only contain generators")

    def with_weights(self, weights: MixtureWeights) -> "GeneratorMixture":
        return replace(self, weights=weights, score=None)

    def with_score(self, score: float) -> "GeneratorMixture":
        return replace(self, score=score)

    def to_dict(self) -> dict[str, Any]:
        return {
            "generators": [g.to_dict() for g in self.generators],
            "weights": self.weights.to_dict(),
            "score": self.score,
            "output_scale": self.output_scale,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GeneratorMixture":
        score = data.get("score")
        return cls(
            generators=tuple(Individual.from_dict(g) for g in data["generators"]),
            weights=MixtureWeights.from_dict(data["weights"]),
            score=None if score is None else float(score),
            output_scale=float(data.get("output_scale", 1.0)),
        )


def sample_mixture(mix: GeneratorMixture, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw n samples: pick generator i with probability w_i, then run it on a
    fresh standard-normal latent.
    """
    choices = rng.choice(len(mix.generators), size=n, p=mix.weights.values)
    first = mix.generators[0]
    samples = np.empty((n, first.shape.output_dim))
    for index, generator in enumerate(mix.generators):
        mask = choices == index
        count = int(mask.sum())
        if count == 0:
            continue
        latent = rng.normal(0.0, 1.0, size=(count, generator.shape.input_dim))
        samples[mask] = generator_forward(generator.params, generator.shape, latent)
    return samples * mix.output_scale


def score_samples(
    samples: np.ndarray,
    real_samples: np.ndarray,
    metric: MixtureMetric,
    dist: Optional[SyntheticDistribution] = None,
) -> float:
    """Score fake samples against real ones with the selected metric."""
    if metric is MixtureMetric.FRECHET_PROXY:
        return frechet_proxy(samples, real_samples)
    if dist is None:
        raise MetricError("The tvd mixture metric needs the target distribution")
    return tvd_to_uniform(samples, dist)


def calculate_mixture_measure(
    mix: GeneratorMixture,
    real_samples: np.ndarray,
    n_fake: int,
    metric: MixtureMetric,
    rng: np.random.Generator,
    dist: Optional[SyntheticDistribution] = None,
) -> GeneratorMixture:
    """
    Score a mixture on n_fake of its own samples.

    Args:
        mix: Mixture to score.
        real_samples: Reference samples in data space.
        n_fake: Number of mixture samples, at least 100.
        metric: Score to compute.
        rng: Random generator for sampling.
        dist: Target distribution (needed by the tvd metric).

    Returns:
        The mixture carrying its score.
    """
    if n_fake < MIN_FAKE_SAMPLES:
        raise MetricError(f"n_fake must be >= {MIN_FAKE_SAMPLES}, got {n_fake}")
    samples = sample_mixture(mix, n_fake, rng)
    score = score_samples(samples, real_samples, metric, dist)
    if not math.isfinite(score):
        raise MetricError(f"Mixture score is not finite: {score}")
    return mix.with_score(score)


def es_accept(
    parent: GeneratorMixture,
    child: GeneratorMixture,
) -> tuple[GeneratorMixture, bool]:
    """
    ES-(1+1) survivor selection: the child survives iff its score is no
    worse than the parent's.
    """
    if child.score is None:
        raise ValueError("Child mixture must be scored before selection")
    if parent.score is None or child.score <= parent.score:
        return child, True
    return parent, False


def evolve_weights_es1p1(
    mix: GeneratorMixture,
    scale: float,
    score_fn: Callable[[GeneratorMixture], float],
    rng: np.random.Generator,
) -> GeneratorMixture:
    """
    One ES-(1+1) generation over the mixture weights.

    Args:
        mix: Parent mixture; scored first if it carries no score.
        scale: Gaussian mutation scale.
        score_fn: Maps a mixture to a finite score, lower is better.
        rng: Random generator.

    Returns:
        The surviving mixture, carrying its score.
    """
    parent = mix if mix.score is not None else mix.with_score(score_fn(mix))
    child = parent.with_weights(mutate_weights(parent.weights, scale, rng))
    try:
        child_score = float(score_fn(child))
        if not math.isfinite(child_score):
            raise MetricError(f"Score is not finite: {child_score}")
    except Exception as e:
        logger.warning(f"Scoring the mutated mixture failed, keeping parent: {e}")
        return parent
    survivor, _ = es_accept(parent, child.with_score(child_score))
    return survivor
