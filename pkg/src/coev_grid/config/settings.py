"""
Experiment Configuration

TOML experiment documents validated with pydantic. Every key has a default,
unknown keys are rejected, and violations surface as ConfigError naming the
dotted key.

Features:
- Sections mirror the library's packages (grid, coev, training, network, ...)
- Round-trip through tomllib / tomli_w
- Conversion helpers to the runtime value types
"""

from pathlib import Path
from typing import Any, Literal, Optional, Union
import logging
import math
import tomllib

import tomli_w
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from coev_grid.coev.population import CoevParams
from coev_grid.data.distributions import SyntheticDistribution, distribution_from_settings
from coev_grid.errors import ConfigError
from coev_grid.grid.topology import CellId, GridSpec, neighborhood_of
from coev_grid.mixture.generators import MixtureMetric
from coev_grid.nn.network import Activation, NetworkShape
from coev_grid.nn.optim import OptimizerKind

logger = logging.getLogger(__name__)

DATA_DIM = 2


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RunSettings(_Section):
    """Run length and master seed."""
    name: str = "coev-grid"
    iterations: int = Field(default=200, ge=0)
    seed: int = Field(default=0, ge=0)


class GridSettings(_Section):
    """Grid dimensions and neighborhood size."""
    rows: int = Field(default=2, ge=1)
    cols: int = Field(default=2, ge=1)
    neighborhood_size: Literal[1, 5] = 5


class CoevSettings(_Section):
    """Selection and mutation hyperparameters."""
    tournament_size: int = Field(default=2, ge=1)
    mutation_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    lr_mutation_scale: float = Field(default=0.0001, ge=0.0)
    mixture_mutation_probability: float = Field(default=1.0, ge=0.0, le=1.0)
    replacement_size: int = Field(default=1, ge=1)
    skip_discriminator_steps: int = Field(default=0, ge=0)


class TrainingSettings(_Section):
    """Gradient training of each cell's networks."""
    initial_learning_rate: float = Field(default=0.0002, ge=0.0, le=1.0)
    batch_size: int = Field(default=100, ge=1)
    batches_per_iteration: int = Field(default=20, ge=1)
    optimizer: Literal["adam", "sgd"] = "adam"
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_epsilon: float = Field(default=1e-8, gt=0.0)
    init_range: float = Field(default=0.05, gt=0.0)
    probability_epsilon: float = Field(default=1e-7, gt=0.0, lt=0.5)
    max_consecutive_failures: int = Field(default=10, ge=1)


class NetworkSettings(_Section):
    """One MLP shape."""
    input_dim: int = Field(ge=1)
    hidden_layers: list[int] = Field(default_factory=lambda: [32, 32])
    output_dim: int = Field(ge=1)
    output_activation: Literal["tanh", "sigmoid"]

    @model_validator(mode="after")
    def _positive_layers(self) -> "NetworkSettings":
        if any(h < 1 for h in self.hidden_layers):
            raise ValueError("hidden layer widths must be >= 1")
        return self

    def to_shape(self) -> NetworkShape:
        return NetworkShape(
            input_dim=self.input_dim,
            hidden_layers=tuple(self.hidden_layers),
            output_dim=self.output_dim,
            output_activation=Activation(self.output_activation),
        )


def _default_generator() -> NetworkSettings:
    return NetworkSettings(input_dim=8, output_dim=DATA_DIM, output_activation="tanh")


def _default_discriminator() -> NetworkSettings:
    return NetworkSettings(input_dim=DATA_DIM, output_dim=1, output_activation="sigmoid")


class NetworksSettings(_Section):
    """Generator and discriminator shapes."""
    generator: NetworkSettings = Field(default_factory=_default_generator)
    discriminator: NetworkSettings = Field(default_factory=_default_discriminator)

    @model_validator(mode="after")
    def _compatible(self) -> "NetworksSettings":
        if self.generator.output_activation != "tanh":
            raise ValueError("generator.output_activation must be tanh")
        if self.discriminator.output_activation != "sigmoid" or self.discriminator.output_dim != 1:
            raise ValueError("discriminator must end in a single sigmoid unit")
        if self.generator.output_dim != DATA_DIM or self.discriminator.input_dim != DATA_DIM:
            raise ValueError(f"generator output and discriminator input must be {DATA_DIM}-dim")
        return self


class DatasetSettings(_Section):
    """Synthetic target distribution."""
    kind: Literal["gaussian_ring", "gaussian_grid", "single_gaussian"] = "gaussian_ring"
    n_modes: int = Field(default=8, ge=1)
    radius: float = Field(default=2.0, gt=0.0)
    std: float = Field(default=0.02, ge=0.0)
    center: list[float] = Field(default_factory=lambda: [0.0, 0.0], min_length=2, max_length=2)

    @field_validator("n_modes")
    @classmethod
    def _modes_fit_kind(cls, n_modes: int, info: ValidationInfo) -> int:
        kind = info.data.get("kind")
        if kind == "gaussian_ring" and n_modes < 2:
            raise ValueError(f"gaussian_ring needs at least 2 modes, got {n_modes}")
        if kind == "gaussian_grid" and math.isqrt(n_modes) ** 2 != n_modes:
            raise ValueError(f"gaussian_grid needs a square mode count, got {n_modes}")
        return n_modes


class MixtureSettings(_Section):
    """Mixture weight evolution and scoring."""
    mutation_scale: float = Field(default=0.01, ge=0.0)
    metric: Literal["frechet_proxy", "tvd"] = "frechet_proxy"
    n_samples: int = Field(default=1000, ge=100)


class DistributionSettings(_Section):
    """Networking and failure handling."""
    poll_interval: float = Field(default=2.0, gt=0.0)
    fetch_timeout: float = Field(default=5.0, gt=0.0)
    failure_policy: Literal["ignore", "abort"] = "ignore"
    max_missed_polls: int = Field(default=3, ge=1)
    request_retries: int = Field(default=3, ge=1)
    schedule: Literal["lockstep", "async"] = "lockstep"


class MetricsSettings(_Section):
    """Evaluation settings."""
    coverage_min_fraction: float = Field(default=0.05, gt=0.0, lt=1.0)


class ExperimentConfig(_Section):
    """A complete, validated experiment configuration."""
    run: RunSettings = Field(default_factory=RunSettings)
    grid: GridSettings = Field(default_factory=GridSettings)
    coev: CoevSettings = Field(default_factory=CoevSettings)
    training: TrainingSettings = Field(default_factory=TrainingSettings)
    network: NetworksSettings = Field(default_factory=NetworksSettings)
    dataset: DatasetSettings = Field(default_factory=DatasetSettings)
    mixture: MixtureSettings = Field(default_factory=MixtureSettings)
    distribution: DistributionSettings = Field(default_factory=DistributionSettings)
    metrics: MetricsSettings = Field(default_factory=MetricsSettings)

    @model_validator(mode="after")
    def _tournament_fits(self) -> "ExperimentConfig":
        members = len(neighborhood_of(self.grid_spec, CellId(0, 0), self.grid.neighborhood_size))
        if self.coev.tournament_size > members:
            raise ValueError(
                f"coev.tournament_size {self.coev.tournament_size} exceeds the "
                f"{members}-member neighborhood"
            )
        return self

    @property
    def grid_spec(self) -> GridSpec:
        return GridSpec(self.grid.rows, self.grid.cols)

    @property
    def generator_shape(self) -> NetworkShape:
        return self.network.generator.to_shape()

    @property
    def discriminator_shape(self) -> NetworkShape:
        return self.network.discriminator.to_shape()

    @property
    def optimizer_kind(self) -> OptimizerKind:
        return OptimizerKind(self.training.optimizer)

    @property
    def mixture_metric(self) -> MixtureMetric:
        return MixtureMetric(self.mixture.metric)

    def coev_params(self) -> CoevParams:
        return CoevParams(
            tournament_size=self.coev.tournament_size,
            mutation_probability=self.coev.mutation_probability,
            mixture_mutation_probability=self.coev.mixture_mutation_probability,
            lr_mutation_scale=self.coev.lr_mutation_scale,
            replacement_size=self.coev.replacement_size,
            skip_discriminator_steps=self.coev.skip_discriminator_steps,
            mixture_mutation_scale=self.mixture.mutation_scale,
            probability_epsilon=self.training.probability_epsilon,
        )

    def to_distribution(self) -> SyntheticDistribution:
        d = self.dataset
        return distribution_from_settings(
            d.kind, d.n_modes, d.radius, d.std, (d.center[0], d.center[1]), self.run.seed
        )

    def with_overrides(self, **sections: dict[str, Any]) -> "ExperimentConfig":
        """Copy with the given section keys replaced, revalidated."""
        data = self.model_dump(mode="json")
        for section, values in sections.items():
            data.setdefault(section, {}).update(values)
        return build_config(data)


def _dotted(loc: tuple[Union[int, str], ...]) -> str:
    return ".".join(str(part) for part in loc) or "<document>"


def build_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a mapping, translating pydantic errors to ConfigError."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(_dotted(tuple(first["loc"])), first["msg"]) from e


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse a TOML experiment document.

    Args:
        text: TOML source; an empty document yields all defaults.

    Returns:
        The validated configuration.

    Raises:
        ConfigError: On malformed TOML, unknown keys or out-of-range values.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError("<document>", f"invalid TOML: {e}") from e
    return build_config(data)


def dump_config(config: ExperimentConfig) -> str:
    """Serialize a configuration back to TOML."""
    return tomli_w.dumps(config.model_dump(mode="json"))


def load_config(path: Optional[Union[str, Path]]) -> ExperimentConfig:
    """Read a TOML file; None yields the defaults."""
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read configuration: {e}") from e
    logger.info(f"Loaded configuration from {path}")
    return parse_config(text)
