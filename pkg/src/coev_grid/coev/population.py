"""
Neighborhood Populations

The generator and discriminator sub-populations a cell trains on, and the
hyperparameters that drive one coevolutionary step.
"""

from dataclasses import dataclass, replace
from typing import Optional

from coev_grid.grid.topology import CellId, NeighborhoodSpec
from coev_grid.mixture.weights import MixtureWeights
from coev_grid.nn.individual import Individual, Role
from coev_grid.nn.loss import PROBABILITY_EPSILON


@dataclass(frozen=True)
class CoevParams:
    """
    Hyperparameters of one coevolutionary step.

    replacement_size is carried for configuration compatibility; the step
    always replaces exactly the center individual of each role.
    """
    tournament_size: int = 2
    mutation_probability: float = 0.5
    mixture_mutation_probability: float = 1.0
    lr_mutation_scale: float = 0.0001
    replacement_size: int = 1
    skip_discriminator_steps: int = 0
    mixture_mutation_scale: float = 0.01
    probability_epsilon: float = PROBABILITY_EPSILON

    def __post_init__(self) -> None:
        if self.tournament_size < 1:
            raise ValueError(f"tournament_size must be >= 1, got {self.tournament_size}")
        for name in ("mutation_probability", "mixture_mutation_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.lr_mutation_scale < 0 or self.mixture_mutation_scale < 0:
            raise ValueError("Mutation scales must be >= 0")
        if self.skip_discriminator_steps < 0:
            raise ValueError(
                f"skip_discriminator_steps must be >= 0, got {self.skip_discriminator_steps}"
            )
        if not 0.0 < self.probability_epsilon < 0.5:
            raise ValueError(f"probability_epsilon must be in (0, 0.5), got {self.probability_epsilon}")

    def skips_discriminator(self, batch_number: int) -> bool:
        """Whether discriminator updates are skipped on the given 1-based batch."""
        n = self.skip_discriminator_steps
        return n > 0 and batch_number % n == 0


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """
    Populations of one cell's neighborhood, center first.

    Slot k of every field belongs to member k of the neighborhood spec.
    """
    generators: tuple[Individual, ...]
    discriminators: tuple[Individual, ...]
    weights_g: MixtureWeights
    weights_d: MixtureWeights
    spec: Optional[NeighborhoodSpec] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "discriminators", tuple(self.discriminators))
        if not self.generators:
            raise ValueError("A neighborhood needs at least one member")
        if len(self.generators) != len(self.discriminators):
            raise ValueError(
                f"{len(self.generators)} generators but {len(self.discriminators)} discriminators"
            )
        if len(self.weights_g) != len(self.generators) or len(self.weights_d) != len(
            self.discriminators
        ):
            raise ValueError("Weight vector lengths must match population lengths")
        if self.spec is not None and len(self.spec) != len(self.generators):
            raise ValueError(
                f"Neighborhood spec has {len(self.spec)} members, populations have "
                f"{len(self.generators)}"
            )
        if any(g.role is not Role.GENERATOR for g in self.generators):
            raise ValueError("generators must all have the generator role")
        if any(d.role is not Role.DISCRIMINATOR for d in self.discriminators):
            raise ValueError("discriminators must all have the discriminator role")

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def center_cell(self) -> CellId:
        if self.spec is not None:
            return self.spec.center
        return self.generators[0].source_cell

    @property
    def center_generator(self) -> Individual:
        return self.generators[0]

    @property
    def center_discriminator(self) -> Individual:
        return self.discriminators[0]

    def population(self, role: Role) -> tuple[Individual, ...]:
        return self.generators if role is Role.GENERATOR else self.discriminators

    def with_centers(self, generator: Individual, discriminator: Individual) -> "Neighborhood":
        return replace(
            self,
            generators=(generator, *self.generators[1:]),
            discriminators=(discriminator, *self.discriminators[1:]),
        )

    def with_populations(
        self,
        generators: tuple[Individual, ...],
        discriminators: tuple[Individual, ...],
    ) -> "Neighborhood":
        return replace(self, generators=generators, discriminators=discriminators)

    def with_weights(self, weights_g: MixtureWeights, weights_d: MixtureWeights) -> "Neighborhood":
        return replace(self, weights_g=weights_g, weights_d=weights_d)
