"""Synthetic target distributions and minibatch sampling."""

from coev_grid.data.distributions import (
    DistributionKind,
    Minibatch,
    SyntheticDistribution,
    assign_mode,
    assign_modes,
    distribution_from_settings,
    get_minibatches,
    mode_counts,
)

__all__ = [
    "DistributionKind",
    "Minibatch",
    "SyntheticDistribution",
    "assign_mode",
    "assign_modes",
    "distribution_from_settings",
    "get_minibatches",
    "mode_counts",
]
