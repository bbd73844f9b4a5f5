"""Tests for mixture weights and generator mixtures."""

from dataclasses import replace

import numpy as np
import pytest

from coev_grid.errors import MetricError
from coev_grid.mixture.generators import (
    GeneratorMixture,
    MixtureMetric,
    calculate_mixture_measure,
    es_accept,
    evolve_weights_es1p1,
    sample_mixture,
)
from coev_grid.mixture.weights import WEIGHT_SUM_TOLERANCE, MixtureWeights, mutate_weights
from coev_grid.nn.individual import Individual, Role
from coev_grid.nn.network import Activation, NetworkShape, generator_forward
from coev_grid.nn.optim import OptimizerKind, OptimizerState

CONSTANT_SHAPE = NetworkShape(2, (), 2, Activation.TANH)


def constant_generator(point):
    """A generator whose output is tanh(bias) for every latent."""
    params = np.zeros(CONSTANT_SHAPE.parameter_count)
    params[-2:] = np.arctanh(np.asarray(point, dtype=np.float64))
    return Individual(
        role=Role.GENERATOR,
        shape=CONSTANT_SHAPE,
        params=params,
        learning_rate=0.001,
        optimizer=OptimizerState.fresh(OptimizerKind.SGD, CONSTANT_SHAPE.parameter_count),
    )


def on_simplex(weights: MixtureWeights) -> bool:
    values = weights.values
    return bool(np.all(values >= 0) and abs(values.sum() - 1.0) <= WEIGHT_SUM_TOLERANCE)


class TestMixtureWeights:
    """Tests for MixtureWeights."""

    def test_uniform(self):
        """Test uniform weights."""
        assert MixtureWeights.uniform(4).values.tolist() == [0.25] * 4

    def test_rejects_off_simplex(self):
        """Test that weights must be non-negative and sum to one."""
        with pytest.raises(ValueError):
            MixtureWeights(np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            MixtureWeights(np.array([1.5, -0.5]))

    def test_round_trip(self):
        """Test bit-exact serialization."""
        weights = MixtureWeights.normalized(np.array([0.1, 0.2, 0.7]))
        assert MixtureWeights.from_dict(weights.to_dict()).equals(weights)


class TestMutateWeights:
    """Tests for mutate_weights."""

    def test_zero_scale(self, rng):
        """Test that scale 0 leaves the weights unchanged."""
        weights = MixtureWeights.uniform(5)
        assert mutate_weights(weights, 0.0, rng).equals(weights)

    def test_single_slot(self, rng):
        """Test that a length-1 vector stays [1.0]."""
        assert mutate_weights(MixtureWeights.uniform(1), 0.5, rng).values.tolist() == [1.0]

    def test_small_steps(self):
        """Test simplex closure and L1 step size at scale 0.01."""
        rng = np.random.default_rng(4)
        weights = MixtureWeights.uniform(5)
        small = 0
        for _ in range(10_000):
            child = mutate_weights(weights, 0.01, rng)
            assert on_simplex(child)
            small += np.abs(child.values - weights.values).sum() < 0.1
        assert small >= 9_900

    def test_negative_scale(self, rng):
        """Test that a negative scale is rejected."""
        with pytest.raises(ValueError):
            mutate_weights(MixtureWeights.uniform(2), -0.1, rng)


class TestSampleMixture:
    """Tests for sample_mixture."""

    def test_zero_weight_never_sampled(self, rng):
        """Test weights [1, 0]."""
        mix = GeneratorMixture(
            (constant_generator([0.5, 0.5]), constant_generator([-0.5, -0.5])),
            MixtureWeights(np.array([1.0, 0.0])),
        )
        samples = sample_mixture(mix, 500, rng)
        np.testing.assert_allclose(samples, np.full((500, 2), 0.5))

    def test_half_half_mean(self):
        """Test the sample mean of two constant generators."""
        rng = np.random.default_rng(8)
        mix = GeneratorMixture(
            (constant_generator([0.6, 0.0]), constant_generator([-0.2, 0.4])),
            MixtureWeights.uniform(2),
        )
        samples = sample_mixture(mix, 100_000, rng)
        np.testing.assert_allclose(samples.mean(axis=0), [0.2, 0.2], atol=0.01)

    def test_selection_frequencies(self):
        """Test that empirical slot frequencies follow the weights."""
        rng = np.random.default_rng(10)
        weights = MixtureWeights(np.array([0.5, 0.3, 0.2]))
        mix = GeneratorMixture(
            tuple(constant_generator([x, 0.0]) for x in (-0.5, 0.0, 0.5)), weights
        )
        samples = sample_mixture(mix, 100_000, rng)
        frequencies = [np.mean(np.isclose(samples[:, 0], x)) for x in (-0.5, 0.0, 0.5)]
        np.testing.assert_allclose(frequencies, weights.values, atol=0.02)

    def test_single_generator(self, make_individual):
        """Test that a unit mixture reproduces its generator."""
        generator = make_individual(Role.GENERATOR)
        mix = GeneratorMixture((generator,), MixtureWeights.uniform(1))
        a = sample_mixture(mix, 50, np.random.default_rng(1))
        rng = np.random.default_rng(1)
        rng.choice(1, size=50, p=[1.0])
        latents = rng.normal(0.0, 1.0, size=(50, generator.shape.input_dim))
        np.testing.assert_array_equal(a, generator_forward(generator.params, generator.shape, latents))

    def test_output_scale(self, rng):
        """Test that samples are mapped back to data space."""
        mix = GeneratorMixture((constant_generator([0.5, -0.25]),), MixtureWeights.uniform(1), output_scale=4.0)
        np.testing.assert_allclose(sample_mixture(mix, 10, rng), np.tile([2.0, -1.0], (10, 1)))

    def test_role_check(self, make_individual):
        """Test that discriminators cannot join a mixture."""
        with pytest.raises(ValueError):
            GeneratorMixture((make_individual(Role.DISCRIMINATOR),), MixtureWeights.uniform(1))


class TestMixtureMeasure:
    """Tests for calculate_mixture_measure."""

    def test_collapsed_scores_worse(self, ring):
        """Test that a one-mode mixture scores far worse than a full-coverage one."""
        rng = np.random.default_rng(2)
        real = ring.sample(1000, rng)
        scale = ring.extent
        full = GeneratorMixture(
            tuple(constant_generator(c / scale) for c in ring.mode_centers),
            MixtureWeights.uniform(ring.n_modes),
            output_scale=scale,
        )
        collapsed = GeneratorMixture(
            (constant_generator(ring.mode_centers[0] / scale),),
            MixtureWeights.uniform(1),
            output_scale=scale,
        )
        good = calculate_mixture_measure(full, real, 1000, MixtureMetric.FRECHET_PROXY, rng)
        bad = calculate_mixture_measure(collapsed, real, 1000, MixtureMetric.FRECHET_PROXY, rng)
        assert good.score < 0.1
        assert bad.score > 10 * good.score

    def test_tvd_metric(self, ring):
        """Test the TVD switch on a full-coverage mixture."""
        rng = np.random.default_rng(3)
        scale = ring.extent
        full = GeneratorMixture(
            tuple(constant_generator(c / scale) for c in ring.mode_centers),
            MixtureWeights.uniform(ring.n_modes),
            output_scale=scale,
        )
        scored = calculate_mixture_measure(full, ring.sample(200, rng), 4000, MixtureMetric.TVD, rng, ring)
        assert scored.score < 0.05

    def test_deterministic(self, ring, make_individual):
        """Test that equal seeds give equal scores."""
        real = ring.sample(500, np.random.default_rng(0))
        mix = GeneratorMixture((make_individual(Role.GENERATOR),), MixtureWeights.uniform(1))
        a = calculate_mixture_measure(mix, real, 200, MixtureMetric.FRECHET_PROXY, np.random.default_rng(5))
        b = calculate_mixture_measure(mix, real, 200, MixtureMetric.FRECHET_PROXY, np.random.default_rng(5))
        assert a.score == b.score

    def test_too_few_samples(self, ring, make_individual, rng):
        """Test the 100-sample minimum."""
        mix = GeneratorMixture((make_individual(Role.GENERATOR),), MixtureWeights.uniform(1))
        with pytest.raises(MetricError):
            calculate_mixture_measure(mix, ring.sample(200, rng), 99, MixtureMetric.FRECHET_PROXY, rng)


class TestEvolution:
    """Tests for ES-(1+1) weight evolution."""

    def _mixture(self, n):
        return GeneratorMixture(
            tuple(constant_generator([0.1 * k, 0.0]) for k in range(n)), MixtureWeights.uniform(n)
        )

    def test_flat_landscape_accepts(self, rng):
        """Test that a constant score always accepts the child."""
        mix = self._mixture(3)
        child = evolve_weights_es1p1(mix, 0.1, lambda m: 1.0, rng)
        assert not child.weights.equals(mix.weights)
        assert child.score == 1.0

    def test_monotone_scores(self):
        """Test that the score sequence never increases."""
        rng = np.random.default_rng(6)
        target = np.array([0.7, 0.2, 0.1, 0.0])

        def distance(m: GeneratorMixture) -> float:
            return float(np.abs(m.weights.values - target).sum())

        mix = self._mixture(4)
        scores = []
        for _ in range(200):
            mix = evolve_weights_es1p1(mix, 0.05, distance, rng)
            scores.append(mix.score)
        assert all(b <= a for a, b in zip(scores, scores[1:]))
        assert scores[-1] < scores[0]

    def test_zero_scale(self, rng):
        """Test that scale 0 returns the parent weights."""
        mix = self._mixture(2)
        out = evolve_weights_es1p1(mix, 0.0, lambda m: 0.5, rng)
        assert out.weights.equals(mix.weights)

    def test_failing_score_keeps_parent(self, rng):
        """Test that a scoring failure retains the parent."""
        mix = self._mixture(2).with_score(0.3)

        def broken(m: GeneratorMixture) -> float:
            raise MetricError("boom")

        out = evolve_weights_es1p1(mix, 0.1, broken, rng)
        assert out is mix

    def test_accept_rule(self):
        """Test acceptance on ties and rejection of worse children."""
        parent = self._mixture(2).with_score(1.0)
        tie = replace(parent, score=1.0)
        worse = replace(parent, score=1.5)
        assert es_accept(parent, tie) == (tie, True)
        assert es_accept(parent, worse) == (parent, False)
        with pytest.raises(ValueError):
            es_accept(parent, self._mixture(2))
