"""
Individuals

One generator or discriminator: parameters, learning rate, optimizer state
and fitness. Individuals are values; every update returns a new one.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional
import math

import numpy as np

from coev_grid.codec import decode_array, encode_array
from coev_grid.errors import NumericError, ShapeError
from coev_grid.grid.topology import CellId
from coev_grid.nn.loss import (
    PROBABILITY_EPSILON,
    gan_loss,
    generator_objective,
    unclamped_mask,
)
from coev_grid.nn.network import (
    NetworkShape,
    activation_derivative,
    backward,
    check_parameters,
    forward,
    init_parameters,
)
from coev_grid.nn.optim import OptimizerKind, OptimizerState, optimizer_step


class Role(Enum):
    """Side of the adversarial game."""
    GENERATOR = "generator"
    DISCRIMINATOR = "discriminator"


@dataclass(frozen=True, eq=False)
class Individual:
    """A network together with its hyperparameters and optimizer state."""
    role: Role
    shape: NetworkShape
    params: np.ndarray
    learning_rate: float
    optimizer: OptimizerState
    fitness: Optional[float] = None
    source_cell: CellId = field(default_factory=lambda: CellId(0, 0))
    iteration: int = 0

    def __post_init__(self) -> None:
        check_parameters(self.params, self.shape)
        self.optimizer.check_length(self.shape.parameter_count)
        if not (self.learning_rate >= 0 and math.isfinite(self.learning_rate)):
            raise ValueError(f"learning_rate must be finite and >= 0, got {self.learning_rate}")
        if self.fitness is not None and not math.isfinite(self.fitness):
            raise NumericError(
                f"Non-finite fitness {self.fitness}",
                cell=self.source_cell,
                iteration=self.iteration,
            )

    @classmethod
    def create(
        cls,
        role: Role,
        shape: NetworkShape,
        rng: np.random.Generator,
        learning_rate: float,
        optimizer_kind: OptimizerKind = OptimizerKind.ADAM,
        init_range: float = 0.05,
        source_cell: Optional[CellId] = None,
    ) -> "Individual":
        """Create a freshly initialized individual."""
        return cls(
            role=role,
            shape=shape,
            params=init_parameters(shape, rng, init_range),
            learning_rate=learning_rate,
            optimizer=OptimizerState.fresh(optimizer_kind, shape.parameter_count),
            source_cell=source_cell or CellId(0, 0),
        )

    def with_fitness(self, fitness: Optional[float]) -> "Individual":
        return replace(self, fitness=fitness)

    def same_parameters(self, other: "Individual") -> bool:
        """Bit-exact parameter comparison."""
        return self.params.shape == other.params.shape and bool(
            np.array_equal(self.params, other.params)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "role": self.role.value,
            "shape": self.shape.to_dict(),
            "params": encode_array(self.params),
            "learning_rate": self.learning_rate,
            "optimizer": self.optimizer.to_dict(),
            "fitness": self.fitness,
            "source_cell": self.source_cell.to_dict(),
            "iteration": self.iteration,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Individual":
        fitness = data.get("fitness")
        return cls(
            role=Role(data["role"]),
            shape=NetworkShape.from_dict(data["shape"]),
            params=decode_array(data["params"]),
            learning_rate=float(data["learning_rate"]),
            optimizer=OptimizerState.from_dict(data["optimizer"]),
            fitness=None if fitness is None else float(fitness),
            source_cell=CellId.from_dict(data["source_cell"]),
            iteration=int(data.get("iteration", 0)),
        )


def _pair(net: Individual, opponent: Individual) -> tuple[Individual, Individual]:
    """Order a pair as (generator, discriminator)."""
    if net.role is opponent.role:
        raise ShapeError(f"Both individuals have role {net.role.value}")
    if net.role is Role.GENERATOR:
        return net, opponent
    return opponent, net


def _check_finite(values: np.ndarray, what: str, individual: Individual) -> None:
    if not np.all(np.isfinite(values)):
        raise NumericError(
            f"Non-finite {what} for {individual.role.value}",
            cell=individual.source_cell,
            iteration=individual.iteration,
        )


def evaluate_pair(
    generator: Individual,
    discriminator: Individual,
    batch: np.ndarray,
    latents: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> float:
    """GAN loss L(G, D) on one batch of real samples and latents."""
    fake = forward(generator.params, generator.shape, latents).output
    _check_finite(fake, "generator output", generator)
    if fake.shape[1] != discriminator.shape.input_dim:
        raise ShapeError(
            f"Generator emits {fake.shape[1]}-dim samples, discriminator expects "
            f"{discriminator.shape.input_dim}"
        )
    d_real = forward(discriminator.params, discriminator.shape, batch).output
    d_fake = forward(discriminator.params, discriminator.shape, fake).output
    _check_finite(d_real, "discriminator output", discriminator)
    _check_finite(d_fake, "discriminator output", discriminator)
    return gan_loss(d_real, d_fake, epsilon)


def individual_loss(
    net: Individual,
    opponent: Individual,
    batch: np.ndarray,
    latents: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> float:
    """
    Scalar that :func:`compute_gradients` differentiates.

    The full loss L for a discriminator; the minimax generator term
    mean(log(1 - D(G(z)))) for a generator.
    """
    generator, discriminator = _pair(net, opponent)
    if net.role is Role.DISCRIMINATOR:
        return evaluate_pair(generator, discriminator, batch, latents, epsilon)
    fake = forward(generator.params, generator.shape, latents).output
    d_fake = forward(discriminator.params, discriminator.shape, fake).output
    return generator_objective(d_fake, epsilon)


def compute_gradients(
    net: Individual,
    opponent: Individual,
    batch: np.ndarray,
    latents: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> np.ndarray:
    """
    Exact gradient of :func:`individual_loss` w.r.t. net.params.

    The opponent is held fixed.

    Args:
        net: Individual being trained.
        opponent: Fixed opponent of the other role.
        batch: Real samples, shape (n, data_dim).
        latents: Latent vectors, shape (m, latent_dim).
        epsilon: Probability clamp.

    Returns:
        Gradient with the same length as net.params.
    """
    generator, discriminator = _pair(net, opponent)
    if len(batch) == 0 or len(latents) == 0:
        raise ShapeError("Cannot compute gradients on an empty batch")

    g_cache = forward(generator.params, generator.shape, latents)
    fake = g_cache.output
    _check_finite(fake, "generator output", generator)
    fake_cache = forward(discriminator.params, discriminator.shape, fake)
    d_fake = fake_cache.output
    _check_finite(d_fake, "discriminator output", discriminator)
    n_fake = d_fake.shape[0]

    if net.role is Role.DISCRIMINATOR:
        real_cache = forward(discriminator.params, discriminator.shape, batch)
        d_real = real_cache.output
        _check_finite(d_real, "discriminator output", discriminator)
        # d/d(logit) of -log(sigmoid) is p - 1, of -log(1 - sigmoid) is p.
        delta_real = unclamped_mask(d_real, epsilon) * (d_real - 1.0) / d_real.shape[0]
        delta_fake = unclamped_mask(d_fake, epsilon) * d_fake / n_fake
        grad_real, _ = backward(discriminator.params, discriminator.shape, real_cache, delta_real)
        grad_fake, _ = backward(discriminator.params, discriminator.shape, fake_cache, delta_fake)
        gradient = grad_real + grad_fake
    else:
        delta = unclamped_mask(d_fake, epsilon) * (-d_fake) / n_fake
        _, grad_fake_input = backward(
            discriminator.params, discriminator.shape, fake_cache, delta
        )
        delta_g = grad_fake_input * activation_derivative(generator.shape, fake)
        gradient, _ = backward(generator.params, generator.shape, g_cache, delta_g)

    _check_finite(gradient, "gradient", net)
    return gradient


def apply_update(individual: Individual, gradient: np.ndarray) -> Individual:
    """Take one optimizer step with the individual's own learning rate."""
    if gradient.shape != individual.params.shape:
        raise ShapeError(
            f"Gradient length {gradient.shape} != parameter length {individual.params.shape}"
        )
    params, state = optimizer_step(
        individual.params, gradient, individual.learning_rate, individual.optimizer
    )
    _check_finite(params, "parameters after update", individual)
    return replace(individual, params=params, optimizer=state)
