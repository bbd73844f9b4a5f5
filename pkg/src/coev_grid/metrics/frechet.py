"""
Fréchet Proxy

Fréchet distance between Gaussians fitted to samples in raw data space, the
desk-scale stand-in for FID (no Inception features).
"""

from dataclasses import dataclass
import logging

import numpy as np
from scipy import linalg

from coev_grid.errors import MetricError

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-9
PSD_TOLERANCE = 1e-9
SQRT_EIGEN_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class GaussianSummary:
    """Mean and covariance of a sample set."""
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        covariance = np.atleast_2d(np.asarray(self.covariance, dtype=np.float64))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", covariance)
        if covariance.shape != (mean.size, mean.size):
            raise MetricError(
                f"Covariance shape {covariance.shape} does not match mean of size {mean.size}"
            )
        if not np.allclose(covariance, covariance.T, atol=SYMMETRY_TOLERANCE, rtol=0.0):
            raise MetricError("Covariance is not symmetric")
        if np.min(linalg.eigvalsh(covariance)) < -PSD_TOLERANCE:
            raise MetricError("Covariance is not positive semi-definite")

    @property
    def dim(self) -> int:
        return int(self.mean.size)


def fit_gaussian(samples: np.ndarray) -> GaussianSummary:
    """Sample mean and unbiased, symmetrized sample covariance."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[:, None]
    n, dim = samples.shape
    if n < dim + 1:
        raise MetricError(f"Need at least {dim + 1} samples to fit a {dim}-dim Gaussian, got {n}")
    covariance = np.atleast_2d(np.cov(samples, rowvar=False, ddof=1))
    covariance = 0.5 * (covariance + covariance.T)
    return GaussianSummary(mean=samples.mean(axis=0), covariance=covariance)


def _clamped_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    eigenvalues = linalg.eigvalsh(0.5 * (matrix + matrix.T))
    if np.min(eigenvalues) < -SQRT_EIGEN_TOLERANCE:
        raise MetricError(f"Matrix has eigenvalue {np.min(eigenvalues):.3e} below tolerance")
    return np.clip(eigenvalues, 0.0, None)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = linalg.eigh(0.5 * (matrix + matrix.T))
    if np.min(eigenvalues) < -SQRT_EIGEN_TOLERANCE:
        raise MetricError(f"Matrix has eigenvalue {np.min(eigenvalues):.3e} below tolerance")
    return (vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ vectors.T


def frechet_distance(a: GaussianSummary, b: GaussianSummary) -> float:
    """
    ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)).

    Tr((S_a S_b)^(1/2)) is taken from the eigenvalues of the symmetric
    product S_a^(1/2) S_b S_a^(1/2), which shares its spectrum with S_a S_b.
    """
    if a.dim != b.dim:
        raise MetricError(f"Dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    root_a = _psd_sqrt(a.covariance)
    product = root_a @ b.covariance @ root_a
    trace_covmean = float(np.sum(np.sqrt(_clamped_eigenvalues(product))))
    value = float(
        diff @ diff
        + np.trace(a.covariance)
        + np.trace(b.covariance)
        - 2.0 * trace_covmean
    )
    return max(value, 0.0)


def frechet_proxy(samples: np.ndarray, reference: np.ndarray) -> float:
    """Fréchet distance between Gaussians fitted to two sample sets."""
    return frechet_distance(fit_gaussian(samples), fit_gaussian(reference))
