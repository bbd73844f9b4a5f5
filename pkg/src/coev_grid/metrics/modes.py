"""
Mode Histograms

Histograms of nearest-mode assignments, total variation distance and mode
coverage.
"""

from dataclasses import dataclass, field

import numpy as np

from coev_grid.data.distributions import SyntheticDistribution, mode_counts
from coev_grid.errors import MetricError


@dataclass(frozen=True, eq=False)
class ModeHistogram:
    """Per-mode sample counts."""
    counts: np.ndarray
    total: int = field(init=False)

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or np.any(counts < 0):
            raise MetricError("Histogram counts must be a non-negative vector")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", int(counts.sum()))

    @classmethod
    def from_samples(cls, samples: np.ndarray, dist: SyntheticDistribution) -> "ModeHistogram":
        return cls(mode_counts(samples, dist))

    @classmethod
    def uniform(cls, n_modes: int) -> "ModeHistogram":
        return cls(np.ones(n_modes, dtype=np.int64))

    @property
    def n_modes(self) -> int:
        return int(self.counts.size)

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise MetricError("Histogram has zero total")
        return self.counts / self.total


def tvd(p: ModeHistogram, q: ModeHistogram) -> float:
    """Total variation distance 1/2 * sum |p_i - q_i| of normalized histograms."""
    if p.n_modes != q.n_modes:
        raise MetricError(f"Histograms have {p.n_modes} and {q.n_modes} modes")
    return float(0.5 * np.sum(np.abs(p.frequencies() - q.frequencies())))


def tvd_to_uniform(samples: np.ndarray, dist: SyntheticDistribution) -> float:
    """TVD between the samples' mode histogram and the uniform one."""
    return tvd(ModeHistogram.from_samples(samples, dist), ModeHistogram.uniform(dist.n_modes))


def mode_coverage(
    samples: np.ndarray,
    dist: SyntheticDistribution,
    min_fraction: float = 0.05,
) -> int:
    """Number of modes receiving at least min_fraction of the samples."""
    if not 0.0 < min_fraction < 1.0:
        raise MetricError(f"min_fraction must lie in (0, 1), got {min_fraction}")
    histogram = ModeHistogram.from_samples(samples, dist)
    if histogram.total == 0:
        return 0
    return int(np.sum(histogram.frequencies() >= min_fraction))
