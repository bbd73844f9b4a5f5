"""
Synthetic Distributions

Two-dimensional Gaussian mixtures used as training targets, minibatch
sampling and nearest-mode assignment.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Union
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator]


class DistributionKind(Enum):
    """Supported synthetic target families."""
    GAUSSIAN_RING = "gaussian_ring"
    GAUSSIAN_GRID = "gaussian_grid"
    SINGLE_GAUSSIAN = "single_gaussian"


@dataclass(frozen=True, eq=False)
class SyntheticDistribution:
    """An isotropic Gaussian mixture with equally weighted modes."""
    kind: DistributionKind
    mode_centers: np.ndarray
    mode_std: float
    seed: int = 0

    def __post_init__(self) -> None:
        centers = np.atleast_2d(np.asarray(self.mode_centers, dtype=np.float64))
        object.__setattr__(self, "mode_centers", centers)
        if centers.shape[0] < 1:
            raise ValueError("A distribution needs at least one mode center")
        if self.mode_std < 0:
            raise ValueError(f"mode_std must be >= 0, got {self.mode_std}")

    @classmethod
    def ring(cls, n_modes: int = 8, radius: float = 2.0, std: float = 0.02, seed: int = 0):
        """k equally spaced modes on a circle."""
        if n_modes < 2:
            raise ValueError(f"A ring needs at least 2 modes, got {n_modes}")
        angles = 2.0 * np.pi * np.arange(n_modes) / n_modes
        centers = radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        return cls(DistributionKind.GAUSSIAN_RING, centers, std, seed)

    @classmethod
    def grid(cls, side: int = 5, spacing: float = 1.0, std: float = 0.02, seed: int = 0):
        """side x side lattice of modes centered on the origin."""
        if side < 1:
            raise ValueError(f"Grid side must be >= 1, got {side}")
        axis = (np.arange(side) - (side - 1) / 2.0) * spacing
        xs, ys = np.meshgrid(axis, axis, indexing="ij")
        centers = np.stack([xs.ravel(), ys.ravel()], axis=1)
        return cls(DistributionKind.GAUSSIAN_GRID, centers, std, seed)

    @classmethod
    def single(
        cls,
        center: tuple[float, float] = (0.0, 0.0),
        std: float = 1.0,
        seed: int = 0,
    ):
        return cls(DistributionKind.SINGLE_GAUSSIAN, np.array([center]), std, seed)

    @property
    def n_modes(self) -> int:
        return int(self.mode_centers.shape[0])

    @property
    def dim(self) -> int:
        return int(self.mode_centers.shape[1])

    @property
    def extent(self) -> float:
        """Scale that maps data space into the generator's (-1, 1) range."""
        return max(1.0, float(np.max(np.abs(self.mode_centers))) + 4.0 * self.mode_std)

    def to_model_space(self, samples: np.ndarray) -> np.ndarray:
        return samples / self.extent

    def to_data_space(self, samples: np.ndarray) -> np.ndarray:
        return samples * self.extent

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n i.i.d. samples, modes chosen uniformly."""
        modes = rng.integers(0, self.n_modes, size=n)
        noise = rng.normal(0.0, 1.0, size=(n, self.dim)) * self.mode_std
        return self.mode_centers[modes] + noise

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "mode_centers": self.mode_centers.tolist(),
            "mode_std": self.mode_std,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class Minibatch:
    """One batch of real samples."""
    samples: np.ndarray
    batch_size: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "batch_size", int(self.samples.shape[0]))
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("Minibatch contains non-finite samples")

    def __len__(self) -> int:
        return self.batch_size


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def get_minibatches(
    dist: SyntheticDistribution,
    batch_size: int,
    n_batches: int,
    seed: SeedLike,
    model_space: bool = False,
) -> list[Minibatch]:
    """
    Draw n_batches batches of batch_size i.i.d. samples.

    Args:
        dist: Target distribution.
        batch_size: Samples per batch.
        n_batches: Number of batches.
        seed: Integer seed or an existing generator (advanced in place).
        model_space: Scale samples into the generator's output range.

    Returns:
        List of minibatches.
    """
    if batch_size < 1 or n_batches < 1:
        raise ValueError(f"batch_size and n_batches must be >= 1, got {batch_size}, {n_batches}")
    rng = _rng(seed)
    batches = []
    for _ in range(n_batches):
        samples = dist.sample(batch_size, rng)
        if model_space:
            samples = dist.to_model_space(samples)
        batches.append(Minibatch(samples))
    return batches


def assign_mode(point: np.ndarray, dist: SyntheticDistribution) -> int:
    """Index of the nearest mode center; ties go to the lowest index."""
    distances = np.sum((dist.mode_centers - np.asarray(point, dtype=np.float64)) ** 2, axis=1)
    return int(np.argmin(distances))


def assign_modes(samples: np.ndarray, dist: SyntheticDistribution) -> np.ndarray:
    """Vectorized :func:`assign_mode` over a batch."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    diffs = samples[:, None, :] - dist.mode_centers[None, :, :]
    return np.argmin(np.sum(diffs ** 2, axis=2), axis=1)


def mode_counts(samples: np.ndarray, dist: SyntheticDistribution) -> np.ndarray:
    """Number of samples assigned to each mode."""
    if len(samples) == 0:
        return np.zeros(dist.n_modes, dtype=np.int64)
    return np.bincount(assign_modes(samples, dist), minlength=dist.n_modes)


def distribution_from_settings(
    kind: str,
    n_modes: int,
    radius: float,
    std: float,
    center: Optional[tuple[float, float]] = None,
    seed: int = 0,
) -> SyntheticDistribution:
    """Build a distribution from flat configuration values."""
    kind_enum = DistributionKind(kind)
    if kind_enum is DistributionKind.GAUSSIAN_RING:
        return SyntheticDistribution.ring(n_modes, radius, std, seed)
    if kind_enum is DistributionKind.GAUSSIAN_GRID:
        side = int(round(math.sqrt(n_modes)))
        if side * side != n_modes:
            raise ValueError(f"gaussian_grid needs a square mode count, got {n_modes}")
        spacing = 2.0 * radius / max(side - 1, 1)
        return SyntheticDistribution.grid(side, spacing, std, seed)
    return SyntheticDistribution.single(center or (0.0, 0.0), std, seed)
