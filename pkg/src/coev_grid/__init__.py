"""
coev-grid - Distributed Spatial Coevolution of GANs

Generators and discriminators evolve on a toroidal grid: every cell trains
against its four neighbors, evolves a weighted mixture of the neighborhood's
generators, and exchanges snapshots with its neighbors over HTTP.

Components:
- nn: MLP generators/discriminators with exact gradients and Adam
- data: Synthetic 2-D Gaussian-mixture targets
- grid: Toroidal grid topology and neighborhoods
- coev: Selection, mutation, training and replacement per cell
- mixture: Generator mixtures and ES-(1+1) weight evolution
- metrics: Fréchet proxy, TVD, mode coverage, network diversity
- distribution: Client/master deployment and single-process grids
- config, results: Experiment files, seeding and run artifacts
"""

__version__ = "0.1.0"
__author__ = "Coev-Grid Developers"

from coev_grid.config.settings import ExperimentConfig, load_config, parse_config
from coev_grid.grid.topology import CellId, GridSpec

__all__ = [
    "CellId",
    "ExperimentConfig",
    "GridSpec",
    "load_config",
    "parse_config",
]
