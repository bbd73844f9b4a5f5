"""Tests for sample-quality metrics."""

import numpy as np
import pytest

from coev_grid.errors import MetricError
from coev_grid.metrics import (
    GaussianSummary,
    ModeHistogram,
    fit_gaussian,
    frechet_distance,
    frechet_proxy,
    mean_pairwise_distance,
    mode_coverage,
    parameter_distances,
    tvd,
    tvd_to_uniform,
)
from coev_grid.nn.individual import Role


class TestFrechetDistance:
    """Tests for the Fréchet distance between Gaussians."""

    def test_one_dimensional(self):
        """Test N(0, 1) against N(1, 1)."""
        a = GaussianSummary(np.array([0.0]), np.array([[1.0]]))
        b = GaussianSummary(np.array([1.0]), np.array([[1.0]]))
        assert frechet_distance(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_scaled_covariance(self):
        """Test I against 4I in two dimensions."""
        a = GaussianSummary(np.zeros(2), np.eye(2))
        b = GaussianSummary(np.zeros(2), 4 * np.eye(2))
        assert frechet_distance(a, b) == pytest.approx(2.0, abs=1e-9)

    def test_identity_and_symmetry(self, rng):
        """Test d(a, a) = 0 and d(a, b) = d(b, a)."""
        a = fit_gaussian(rng.normal(size=(500, 3)))
        b = fit_gaussian(rng.normal(1.0, 2.0, size=(500, 3)))
        assert frechet_distance(a, a) == pytest.approx(0.0, abs=1e-8)
        assert frechet_distance(a, b) == pytest.approx(frechet_distance(b, a), rel=1e-8)
        assert frechet_distance(a, b) > 0

    def test_non_psd_rejected(self):
        """Test that a covariance with a negative eigenvalue is refused."""
        with pytest.raises(MetricError):
            GaussianSummary(np.zeros(2), np.diag([1.0, -0.5]))

    def test_dimension_mismatch(self):
        """Test Gaussians of different dimension."""
        with pytest.raises(MetricError):
            frechet_distance(
                GaussianSummary(np.zeros(2), np.eye(2)),
                GaussianSummary(np.zeros(3), np.eye(3)),
            )

    def test_proxy_close_for_same_distribution(self, ring):
        """Test that two draws from one distribution score near zero."""
        a = ring.sample(4000, np.random.default_rng(1))
        b = ring.sample(4000, np.random.default_rng(2))
        assert frechet_proxy(a, b) < 0.05


class TestFitGaussian:
    """Tests for fit_gaussian."""

    def test_constant_samples(self):
        """Test that constant samples give a zero covariance."""
        summary = fit_gaussian(np.tile([1.0, -2.0], (10, 1)))
        np.testing.assert_array_equal(summary.mean, [1.0, -2.0])
        np.testing.assert_array_equal(summary.covariance, np.zeros((2, 2)))

    def test_too_few_samples(self):
        """Test that n must exceed the dimension."""
        with pytest.raises(MetricError):
            fit_gaussian(np.zeros((2, 2)))


class TestTvd:
    """Tests for total variation distance."""

    def test_known_value(self):
        """Test [1, 1] against [3, 1]."""
        assert tvd(ModeHistogram(np.array([1, 1])), ModeHistogram(np.array([3, 1]))) == pytest.approx(0.25)

    def test_disjoint(self):
        """Test that disjoint supports are at distance one."""
        assert tvd(ModeHistogram(np.array([5, 0])), ModeHistogram(np.array([0, 2]))) == pytest.approx(1.0)

    def test_metric_axioms(self):
        """Test range, symmetry and the triangle inequality on random histograms."""
        rng = np.random.default_rng(9)
        for _ in range(1000):
            p, q, r = (ModeHistogram(rng.integers(0, 20, size=6) + 1) for _ in range(3))
            assert 0.0 <= tvd(p, q) <= 1.0
            assert tvd(p, q) == pytest.approx(tvd(q, p))
            assert tvd(p, r) <= tvd(p, q) + tvd(q, r) + 1e-12

    def test_mode_count_mismatch(self):
        """Test histograms over different numbers of modes."""
        with pytest.raises(MetricError):
            tvd(ModeHistogram.uniform(3), ModeHistogram.uniform(4))

    def test_zero_total(self):
        """Test that an empty histogram is rejected."""
        with pytest.raises(MetricError):
            tvd(ModeHistogram(np.zeros(3, dtype=int)), ModeHistogram.uniform(3))

    def test_uniform_samples(self, ring):
        """Test that real samples are close to uniform over the modes."""
        samples = ring.sample(20_000, np.random.default_rng(3))
        assert tvd_to_uniform(samples, ring) < 0.02


class TestModeCoverage:
    """Tests for mode_coverage."""

    def test_full_coverage(self, ring, rng):
        """Test that real samples cover all eight modes."""
        assert mode_coverage(ring.sample(5000, rng), ring) == 8

    def test_collapsed(self, ring):
        """Test samples at a single center."""
        samples = np.tile(ring.mode_centers[3], (500, 1))
        assert mode_coverage(samples, ring) == 1

    def test_two_modes(self, ring):
        """Test an even split across two modes."""
        samples = np.vstack([np.tile(ring.mode_centers[0], (50, 1)), np.tile(ring.mode_centers[4], (50, 1))])
        assert mode_coverage(samples, ring) == 2

    def test_fraction_bounds(self, ring, rng):
        """Test that min_fraction must lie strictly inside (0, 1)."""
        with pytest.raises(MetricError):
            mode_coverage(ring.sample(10, rng), ring, min_fraction=0.0)


class TestDiversity:
    """Tests for parameter diversity."""

    def test_identical_networks(self, make_individual):
        """Test that a network is at distance zero from itself."""
        g = make_individual(Role.GENERATOR)
        assert mean_pairwise_distance([g, g]) == 0.0

    def test_distance_matrix(self, make_individual):
        """Test the matrix against direct norms."""
        nets = [make_individual(Role.GENERATOR) for _ in range(3)]
        matrix = parameter_distances(nets)
        assert matrix.shape == (3, 3)
        np.testing.assert_allclose(np.diag(matrix), 0.0)
        assert matrix[0, 2] == pytest.approx(np.linalg.norm(nets[0].params - nets[2].params))
        assert mean_pairwise_distance(nets) == pytest.approx(matrix[np.triu_indices(3, 1)].mean())

    def test_single_network(self, make_individual):
        """Test fewer than two networks."""
        assert mean_pairwise_distance([make_individual(Role.GENERATOR)]) == 0.0
