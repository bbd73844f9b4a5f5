"""Mixtures of generators and ES-(1+1) weight evolution."""

from coev_grid.mixture.generators import (
    GeneratorMixture,
    MixtureMetric,
    calculate_mixture_measure,
    es_accept,
    evolve_weights_es1p1,
    sample_mixture,
    score_samples,
)
from coev_grid.mixture.weights import MixtureWeights, mutate_weights

__all__ = [
    "GeneratorMixture",
    "MixtureMetric",
    "MixtureWeights",
    "calculate_mixture_measure",
    "es_accept",
    "evolve_weights_es1p1",
    "mutate_weights",
    "sample_mixture",
    "score_samples",
]
