"""Experiment configuration and deterministic seeding."""

from coev_grid.config.seeding import StreamKind, seed_hierarchy, seed_sequence
from coev_grid.config.settings import (
    CoevSettings,
    DatasetSettings,
    DistributionSettings,
    ExperimentConfig,
    GridSettings,
    MetricsSettings,
    MixtureSettings,
    NetworkSettings,
    RunSettings,
    TrainingSettings,
    build_config,
    dump_config,
    load_config,
    parse_config,
)

__all__ = [
    "CoevSettings",
    "DatasetSettings",
    "DistributionSettings",
    "ExperimentConfig",
    "GridSettings",
    "MetricsSettings",
    "MixtureSettings",
    "NetworkSettings",
    "RunSettings",
    "StreamKind",
    "TrainingSettings",
    "build_config",
    "dump_config",
    "load_config",
    "parse_config",
    "seed_hierarchy",
    "seed_sequence",
]
