"""
Mixture Weights

Probability vectors over a neighborhood's slots and their Gaussian mutation.
"""

from dataclasses import dataclass
from typing import Any
import logging

import numpy as np

from coev_grid.codec import decode_array, encode_array

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-9
MAX_MUTATION_ATTEMPTS = 100


@dataclass(frozen=True, eq=False)
class MixtureWeights:
    """Non-negative weights summing to one."""
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("Mixture weights must be a non-empty vector")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError(f"Mixture weights must be finite and non-negative: {values}")
        if abs(values.sum() - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"Mixture weights sum to {values.sum()!r}, expected 1")

    @classmethod
    def uniform(cls, n: int) -> "MixtureWeights":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, raw: np.ndarray) -> "MixtureWeights":
        raw = np.asarray(raw, dtype=np.float64)
        return cls(raw / raw.sum())

    def __len__(self) -> int:
        return int(self.values.size)

    def equals(self, other: "MixtureWeights") -> bool:
        return bool(np.array_equal(self.values, other.values))

    def to_dict(self) -> dict[str, Any]:
        return {"values": encode_array(self.values)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MixtureWeights":
        return cls(decode_array(data["values"]))


def mutate_weights(
    weights: MixtureWeights,
    scale: float,
    rng: np.random.Generator,
) -> MixtureWeights:
    """
    w'_i = |w_i + N(0, scale^2)|, renormalized onto the simplex.

    An all-zero draw is redrawn.
    """
    if scale < 0:
        raise ValueError(f"Mutation scale must be >= 0, got {scale}")
    if scale == 0:
        return weights
    for _ in range(MAX_MUTATION_ATTEMPTS):
        raw = np.abs(weights.values + rng.normal(0.0, scale, size=len(weights)))
        if raw.sum() > 0:
            return MixtureWeights.normalized(raw)
    logger.warning(f"Weight mutation produced {MAX_MUTATION_ATTEMPTS} all-zero draws; keeping parent")
    return weights
