"""
Adversarial Loss

Binary cross-entropy form of the GAN objective with probability clamping.
"""

import numpy as np

from coev_grid.errors import ShapeError

PROBABILITY_EPSILON = 1e-7


def clamp_probabilities(p: np.ndarray, epsilon: float = PROBABILITY_EPSILON) -> np.ndarray:
    """Clamp probabilities into [epsilon, 1 - epsilon]."""
    return np.clip(p, epsilon, 1.0 - epsilon)


def unclamped_mask(p: np.ndarray, epsilon: float = PROBABILITY_EPSILON) -> np.ndarray:
    """1.0 where the clamp is inactive (the loss has a gradient), else 0.0."""
    return ((p > epsilon) & (p < 1.0 - epsilon)).astype(np.float64)


def _check_batch(name: str, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).ravel()
    if p.size == 0:
        raise ShapeError(f"{name} is empty")
    return p


def gan_loss(
    d_on_real: np.ndarray,
    d_on_fake: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> float:
    """
    L = -mean(log D(x)) - mean(log(1 - D(G(z)))).

    The discriminator minimizes L; the objective value it maximizes is -L.
    """
    real = clamp_probabilities(_check_batch("d_on_real", d_on_real), epsilon)
    fake = clamp_probabilities(_check_batch("d_on_fake", d_on_fake), epsilon)
    return float(-np.mean(np.log(real)) - np.mean(np.log1p(-fake)))


def generator_objective(
    d_on_fake: np.ndarray,
    epsilon: float = PROBABILITY_EPSILON,
) -> float:
    """Minimax generator term mean(log(1 - D(G(z)))), minimized by the generator."""
    fake = clamp_probabilities(_check_batch("d_on_fake", d_on_fake), epsilon)
    return float(np.mean(np.log1p(-fake)))
