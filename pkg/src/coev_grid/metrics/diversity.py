"""
Network Diversity

L2 distances between the parameter vectors of a neighborhood's networks.
"""

from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from coev_grid.nn.individual import Individual


def parameter_distances(individuals: Sequence[Individual]) -> np.ndarray:
    """Symmetric matrix of pairwise L2 parameter distances."""
    if len(individuals) < 2:
        return np.zeros((len(individuals), len(individuals)))
    stacked = np.stack([ind.params for ind in individuals])
    return squareform(pdist(stacked, metric="euclidean"))


def mean_pairwise_distance(individuals: Sequence[Individual]) -> float:
    """Mean off-diagonal L2 distance; 0 for fewer than two networks."""
    if len(individuals) < 2:
        return 0.0
    stacked = np.stack([ind.params for ind in individuals])
    return float(np.mean(pdist(stacked, metric="euclidean")))
