"""Harnesses for grid-size trends, collapse recovery and communication scaling."""

from coev_grid.experiments.trends import (
    RecoveryOutcome,
    RecoveryResult,
    RunOutcome,
    ScalingPoint,
    TrendResult,
    collapse_recovery,
    communication_scaling,
    grid_size_trend,
    sized_config,
    winner_outcome,
)

__all__ = [
    "RecoveryOutcome",
    "RecoveryResult",
    "RunOutcome",
    "ScalingPoint",
    "TrendResult",
    "collapse_recovery",
    "communication_scaling",
    "grid_size_trend",
    "sized_config",
    "winner_outcome",
]
