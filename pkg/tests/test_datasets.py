"""Tests for synthetic distributions and minibatches."""

import numpy as np
import pytest

from coev_grid.data.distributions import (
    DistributionKind,
    SyntheticDistribution,
    assign_mode,
    distribution_from_settings,
    get_minibatches,
    mode_counts,
)
from coev_grid.metrics.modes import tvd_to_uniform


class TestSyntheticDistribution:
    """Tests for SyntheticDistribution."""

    def test_ring_geometry(self):
        """Test equally spaced centers on the circle."""
        dist = SyntheticDistribution.ring(8, 2.0, 0.02)
        assert dist.n_modes == 8
        np.testing.assert_allclose(np.linalg.norm(dist.mode_centers, axis=1), 2.0)
        np.testing.assert_allclose(dist.mode_centers[0], [2.0, 0.0], atol=1e-12)

    def test_ring_needs_two_modes(self):
        """Test that a one-mode ring is rejected."""
        with pytest.raises(ValueError):
            SyntheticDistribution.ring(1)

    def test_grid_lattice(self):
        """Test an m x m lattice centered on the origin."""
        dist = SyntheticDistribution.grid(3, 1.0)
        assert dist.n_modes == 9
        np.testing.assert_allclose(dist.mode_centers.mean(axis=0), [0.0, 0.0], atol=1e-12)

    def test_extent_covers_modes(self, ring):
        """Test that model space holds every mode inside (-1, 1)."""
        assert ring.extent == pytest.approx(2.08)
        assert np.all(np.abs(ring.to_model_space(ring.mode_centers)) < 1.0)

    def test_from_settings(self):
        """Test construction from flat configuration values."""
        ring = distribution_from_settings("gaussian_ring", 8, 2.0, 0.02)
        assert ring.kind is DistributionKind.GAUSSIAN_RING
        assert distribution_from_settings("gaussian_grid", 25, 2.0, 0.02).n_modes == 25
        with pytest.raises(ValueError):
            distribution_from_settings("gaussian_grid", 8, 2.0, 0.02)


class TestMinibatches:
    """Tests for get_minibatches."""

    def test_degenerate_std(self):
        """Test that a zero-std single Gaussian yields its center exactly."""
        dist = SyntheticDistribution.single((0.0, 0.0), std=0.0)
        for batch in get_minibatches(dist, 10, 3, seed=0):
            assert np.array_equal(batch.samples, np.zeros((10, 2)))

    def test_counts(self, ring):
        """Test batch count and size."""
        batches = get_minibatches(ring, 100, 4, seed=1)
        assert len(batches) == 4
        assert all(b.batch_size == 100 for b in batches)

    def test_ring_mean_near_origin(self, ring):
        """Test the empirical mean of 10k ring samples."""
        samples = get_minibatches(ring, 10_000, 1, seed=2)[0].samples
        assert np.linalg.norm(samples.mean(axis=0)) < 0.05

    def test_seed_determinism(self, ring):
        """Test that the same seed gives identical streams."""
        a = get_minibatches(ring, 50, 2, seed=3)
        b = get_minibatches(ring, 50, 2, seed=3)
        assert all(np.array_equal(x.samples, y.samples) for x, y in zip(a, b))

    def test_invalid_counts(self, ring):
        """Test that non-positive counts are rejected."""
        with pytest.raises(ValueError):
            get_minibatches(ring, 0, 1, seed=0)
        with pytest.raises(ValueError):
            get_minibatches(ring, 1, 0, seed=0)

    def test_model_space(self, ring):
        """Test that model-space batches are the scaled data-space batches."""
        data = get_minibatches(ring, 20, 1, seed=4)[0].samples
        model = get_minibatches(ring, 20, 1, seed=4, model_space=True)[0].samples
        np.testing.assert_allclose(model * ring.extent, data)


class TestAssignMode:
    """Tests for nearest-mode assignment."""

    def test_exact_center(self, ring):
        """Test a point sitting on center 3."""
        assert assign_mode(ring.mode_centers[3], ring) == 3

    def test_tie_goes_to_lowest_index(self):
        """Test that an equidistant point picks the lower index."""
        centers = np.array([[9.0, 9.0], [-1.0, 0.0], [1.0, 0.0]])
        dist = SyntheticDistribution(DistributionKind.GAUSSIAN_GRID, centers, 0.1)
        assert assign_mode([0.0, 5.0], dist) == 1

    def test_mode_zero_samples(self, ring, rng):
        """Test that tight samples around mode 0 are assigned to it."""
        points = ring.mode_centers[0] + rng.normal(0.0, 0.02, size=(1000, 2))
        assert mode_counts(points, ring)[0] >= 990

    def test_histogram_converges_to_uniform(self, ring, rng):
        """Test TVD to uniform at 10k true samples."""
        assert tvd_to_uniform(ring.sample(10_000, rng), ring) < 0.05
