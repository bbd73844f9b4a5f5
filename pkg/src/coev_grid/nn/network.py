"""
Feed-forward Networks

Multi-layer perceptrons over a flat float64 parameter vector, with manual
backpropagation.

Parameter layout: layer-major, weights before biases, each weight matrix
stored row-major with shape (fan_in, fan_out).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any
import logging

import numpy as np
from scipy.special import expit

from coev_grid.errors import ShapeError

logger = logging.getLogger(__name__)


class Activation(Enum):
    """Output activation of the final layer. Hidden layers always use tanh."""
    TANH = "tanh"
    SIGMOID = "sigmoid"


@dataclass(frozen=True)
class NetworkShape:
    """Layer dimensions of an MLP."""
    input_dim: int
    hidden_layers: tuple[int, ...] = field(default_factory=tuple)
    output_dim: int = 1
    output_activation: Activation = Activation.TANH

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        dims = [self.input_dim, *self.hidden_layers, self.output_dim]
        if any(d < 1 for d in dims):
            raise ShapeError(f"All layer dimensions must be >= 1, got {dims}")

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) for every layer."""
        dims = [self.input_dim, *self.hidden_layers, self.output_dim]
        return list(zip(dims[:-1], dims[1:]))

    @property
    def parameter_count(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_dims)

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_dim": self.input_dim,
            "hidden_layers": list(self.hidden_layers),
            "output_dim": self.output_dim,
            "output_activation": self.output_activation.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NetworkShape":
        return cls(
            input_dim=int(data["input_dim"]),
            hidden_layers=tuple(data.get("hidden_layers", ())),
            output_dim=int(data["output_dim"]),
            output_activation=Activation(data.get("output_activation", "tanh")),
        )


@dataclass
class ForwardCache:
    """Activations of every layer, input first, kept for backpropagation."""
    activations: list[np.ndarray]

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


def check_parameters(params: np.ndarray, shape: NetworkShape) -> None:
    """Raise ShapeError unless params is a flat vector of the right length."""
    if params.ndim != 1 or params.shape[0] != shape.parameter_count:
        raise ShapeError(
            f"Parameter vector of shape {params.shape} does not match "
            f"{shape.parameter_count} parameters implied by {shape.layer_dims}"
        )


def unpack(params: np.ndarray, shape: NetworkShape) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into per-layer (weights, biases) views."""
    check_parameters(params, shape)
    layers = []
    offset = 0
    for fan_in, fan_out in shape.layer_dims:
        weights = params[offset:offset + fan_in * fan_out].reshape(fan_in, fan_out)
        offset += fan_in * fan_out
        biases = params[offset:offset + fan_out]
        offset += fan_out
        layers.append((weights, biases))
    return layers


def init_parameters(
    shape: NetworkShape,
    rng: np.random.Generator,
    init_range: float = 0.05,
) -> np.ndarray:
    """Draw every parameter from uniform(-init_range, init_range)."""
    return rng.uniform(-init_range, init_range, size=shape.parameter_count)


def forward(
    params: np.ndarray,
    shape: NetworkShape,
    inputs: np.ndarray,
) -> ForwardCache:
    """
    Evaluate the network on a batch.

    Args:
        params: Flat parameter vector.
        shape: Network shape.
        inputs: Batch of shape (n, input_dim).

    Returns:
        ForwardCache whose output has shape (n, output_dim).
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != shape.input_dim:
        raise ShapeError(
            f"Expected a batch of {shape.input_dim}-dim inputs, got shape {inputs.shape}"
        )
    layers = unpack(params, shape)
    activations = [inputs]
    hidden = inputs
    last = len(layers) - 1
    for index, (weights, biases) in enumerate(layers):
        pre = hidden @ weights + biases
        if index == last and shape.output_activation is Activation.SIGMOID:
            hidden = expit(pre)
        else:
            hidden = np.tanh(pre)
        activations.append(hidden)
    return ForwardCache(activations=activations)


def backward(
    params: np.ndarray,
    shape: NetworkShape,
    cache: ForwardCache,
    output_delta: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Backpropagate a gradient through the network.

    Args:
        params: Flat parameter vector used for the forward pass.
        shape: Network shape.
        cache: Activations from :func:`forward`.
        output_delta: Gradient of the loss w.r.t. the final layer's
            pre-activation, shape (n, output_dim).

    Returns:
        (gradient w.r.t. params, gradient w.r.t. the inputs).
    """
    layers = unpack(params, shape)
    grads = np.zeros_like(params)
    offsets = []
    offset = 0
    for fan_in, fan_out in shape.layer_dims:
        offsets.append(offset)
        offset += fan_in * fan_out + fan_out

    delta = output_delta
    for index in range(len(layers) - 1, -1, -1):
        weights, _ = layers[index]
        layer_input = cache.activations[index]
        fan_in, fan_out = weights.shape
        start = offsets[index]
        grads[start:start + fan_in * fan_out] = (layer_input.T @ delta).ravel()
        grads[start + fan_in * fan_out:start + fan_in * fan_out + fan_out] = delta.sum(axis=0)
        delta = delta @ weights.T
        if index > 0:
            delta = delta * (1.0 - layer_input ** 2)
    return grads, delta


def activation_derivative(shape: NetworkShape, output: np.ndarray) -> np.ndarray:
    """Derivative of the final activation expressed through its output."""
    if shape.output_activation is Activation.SIGMOID:
        return output * (1.0 - output)
    return 1.0 - output ** 2


def generator_forward(
    params: np.ndarray,
    shape: NetworkShape,
    latent: np.ndarray,
) -> np.ndarray:
    """Map a batch of latent vectors to samples in (-1, 1)."""
    return forward(params, shape, latent).output


def discriminator_forward(
    params: np.ndarray,
    shape: NetworkShape,
    samples: np.ndarray,
) -> np.ndarray:
    """Probability that each sample is real, as a flat vector."""
    return forward(params, shape, samples).output[:, 0]
