"""Pytest configuration and fixtures."""

from dataclasses import replace
from typing import Any, Callable

import numpy as np
import pytest

from coev_grid.config.settings import ExperimentConfig, build_config
from coev_grid.data.distributions import SyntheticDistribution
from coev_grid.distribution.snapshot import CellSnapshot
from coev_grid.grid.topology import CellId
from coev_grid.mixture.weights import MixtureWeights
from coev_grid.nn.individual import Individual, Role, apply_update
from coev_grid.nn.network import Activation, NetworkShape
from coev_grid.nn.optim import OptimizerKind, OptimizerState


def _small_document() -> dict[str, Any]:
    return {
        "run": {"iterations": 3, "seed": 7},
        "grid": {"rows": 2, "cols": 2},
        "training": {"batch_size": 32, "batches_per_iteration": 2},
        "network": {
            "generator": {
                "input_dim": 4,
                "hidden_layers": [8],
                "output_dim": 2,
                "output_activation": "tanh",
            },
            "discriminator": {
                "input_dim": 2,
                "hidden_layers": [8],
                "output_dim": 1,
                "output_activation": "sigmoid",
            },
        },
        "mixture": {"n_samples": 200},
        "distribution": {"poll_interval": 0.05, "fetch_timeout": 5.0},
    }


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def ring():
    """Default 8-mode ring."""
    return SyntheticDistribution.ring(8, 2.0, 0.02)


@pytest.fixture
def generator_shape():
    """Small generator shape."""
    return NetworkShape(4, (8,), 2, Activation.TANH)


@pytest.fixture
def discriminator_shape():
    """Small discriminator shape."""
    return NetworkShape(2, (8,), 1, Activation.SIGMOID)


@pytest.fixture
def make_individual(rng, generator_shape, discriminator_shape):
    """Factory for small individuals of either role."""
    def make(
        role: Role,
        cell: CellId = CellId(0, 0),
        learning_rate: float = 0.001,
        kind: OptimizerKind = OptimizerKind.ADAM,
    ) -> Individual:
        shape = generator_shape if role is Role.GENERATOR else discriminator_shape
        return Individual.create(
            role, shape, rng, learning_rate, optimizer_kind=kind, init_range=0.5, source_cell=cell
        )
    return make


@pytest.fixture
def uniform_weights():
    """Factory for uniform mixture weights."""
    return MixtureWeights.uniform


@pytest.fixture
def make_config() -> Callable[..., ExperimentConfig]:
    """Factory for a small, fast configuration with per-section overrides."""
    def make(**sections: dict[str, Any]) -> ExperimentConfig:
        document = _small_document()
        for section, values in sections.items():
            document.setdefault(section, {}).update(values)
        return build_config(document)
    return make


@pytest.fixture
def small_config(make_config):
    """Small 2x2 configuration."""
    return make_config()


@pytest.fixture
def frozen_config(make_config):
    """Configuration under which nothing learns or mutates."""
    return make_config(
        training={"batch_size": 32, "batches_per_iteration": 2, "initial_learning_rate": 0.0},
        coev={"mutation_probability": 0.0, "mixture_mutation_probability": 0.0},
    )


@pytest.fixture
def fresh_adam():
    """Factory for zeroed Adam state."""
    return lambda count: OptimizerState.fresh(OptimizerKind.ADAM, count)


def _random_snapshot(rng: np.random.Generator) -> CellSnapshot:
    hidden = tuple(int(h) for h in rng.integers(1, 6, size=int(rng.integers(0, 3))))
    latent = int(rng.integers(1, 5))
    kind = OptimizerKind.ADAM if rng.random() < 0.5 else OptimizerKind.SGD
    cell = CellId(int(rng.integers(0, 4)), int(rng.integers(0, 4)))
    g = Individual.create(
        Role.GENERATOR, NetworkShape(latent, hidden, 2, Activation.TANH),
        rng, float(rng.uniform(0, 0.01)), optimizer_kind=kind, source_cell=cell,
    )
    d = Individual.create(
        Role.DISCRIMINATOR, NetworkShape(2, hidden, 1, Activation.SIGMOID),
        rng, float(rng.uniform(0, 0.01)), optimizer_kind=kind, source_cell=cell,
    )
    g = apply_update(g, rng.normal(size=g.params.size)).with_fitness(float(rng.normal()))
    d = replace(d, params=d.params * 10.0 ** rng.uniform(-300, 300, size=d.params.size))
    n = int(rng.integers(1, 6))
    return CellSnapshot(
        cell=cell,
        iteration=int(rng.integers(0, 1000)),
        generator=g,
        discriminator=d,
        weights_g=MixtureWeights.normalized(rng.random(n) + 1e-3),
        weights_d=MixtureWeights.normalized(rng.random(n) + 1e-3),
        mixture_score=float(rng.random()) if rng.random() < 0.5 else None,
    )


def _same_individual(a: Individual, b: Individual) -> bool:
    return (
        a.role is b.role
        and a.shape == b.shape
        and a.same_parameters(b)
        and a.learning_rate == b.learning_rate
        and a.fitness == b.fitness
        and a.source_cell == b.source_cell
        and a.optimizer.to_dict() == b.optimizer.to_dict()
    )


@pytest.fixture
def random_snapshot():
    """Factory for randomized snapshots with optimizer state and extreme reals."""
    return _random_snapshot


@pytest.fixture
def same_individual():
    """Bit-exact comparison of two individuals."""
    return _same_individual
