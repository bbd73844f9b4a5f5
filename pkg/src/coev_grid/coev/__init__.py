"""Spatial coevolution: selection, mutation, training and replacement per cell."""

from coev_grid.coev.evaluation import evaluate_all_pairs, pair_losses
from coev_grid.coev.population import CoevParams, Neighborhood
from coev_grid.coev.selection import (
    draw_opponent_index,
    get_random_opponent,
    mutate_learning_rate,
    tournament_select,
)
from coev_grid.coev.step import ReplacementEvent, StepResult, step_gan_coev

__all__ = [
    "CoevParams",
    "Neighborhood",
    "ReplacementEvent",
    "StepResult",
    "draw_opponent_index",
    "evaluate_all_pairs",
    "get_random_opponent",
    "mutate_learning_rate",
    "pair_losses",
    "step_gan_coev",
    "tournament_select",
]
