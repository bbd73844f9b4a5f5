"""Fréchet proxy, mode histograms, TVD, coverage and network diversity."""

from coev_grid.metrics.diversity import mean_pairwise_distance, parameter_distances
from coev_grid.metrics.frechet import (
    GaussianSummary,
    fit_gaussian,
    frechet_distance,
    frechet_proxy,
)
from coev_grid.metrics.modes import ModeHistogram, mode_coverage, tvd, tvd_to_uniform

__all__ = [
    "GaussianSummary",
    "ModeHistogram",
    "fit_gaussian",
    "frechet_distance",
    "frechet_proxy",
    "mean_pairwise_distance",
    "mode_coverage",
    "parameter_distances",
    "tvd",
    "tvd_to_uniform",
]
