"""Minimal MLP generator/discriminator networks with exact gradients."""

from coev_grid.nn.individual import (
    Individual,
    Role,
    apply_update,
    compute_gradients,
    evaluate_pair,
    individual_loss,
)
from coev_grid.nn.loss import PROBABILITY_EPSILON, gan_loss, generator_objective
from coev_grid.nn.network import (
    Activation,
    NetworkShape,
    discriminator_forward,
    forward,
    generator_forward,
)
from coev_grid.nn.optim import OptimizerKind, OptimizerState, optimizer_step

__all__ = [
    "Activation",
    "Individual",
    "NetworkShape",
    "OptimizerKind",
    "OptimizerState",
    "PROBABILITY_EPSILON",
    "Role",
    "apply_update",
    "compute_gradients",
    "discriminator_forward",
    "evaluate_pair",
    "forward",
    "gan_loss",
    "generator_forward",
    "generator_objective",
    "individual_loss",
    "optimizer_step",
]
