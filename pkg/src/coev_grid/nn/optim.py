"""
Optimizers

SGD and Adam with value-semantics state that can be shipped between cells.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np

from coev_grid.codec import decode_array, encode_array
from coev_grid.errors import ShapeError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


class OptimizerKind(Enum):
    """Supported gradient optimizers."""
    SGD = "sgd"
    ADAM = "adam"


def _empty() -> np.ndarray:
    return np.zeros(0, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class OptimizerState:
    """Complete optimizer state, including Adam moment estimates."""
    kind: OptimizerKind = OptimizerKind.ADAM
    step_count: int = 0
    first_moment: np.ndarray = field(default_factory=_empty)
    second_moment: np.ndarray = field(default_factory=_empty)
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    epsilon: float = ADAM_EPSILON

    def __post_init__(self) -> None:
        if self.step_count < 0:
            raise ValueError(f"step_count must be >= 0, got {self.step_count}")
        if self.kind is OptimizerKind.SGD and (self.first_moment.size or self.second_moment.size):
            raise ShapeError("SGD state carries no moment arrays")
        if self.first_moment.shape != self.second_moment.shape:
            raise ShapeError("Adam moment arrays differ in length")
        if np.any(self.second_moment < 0):
            raise ValueError("Adam second moment must be non-negative")

    @classmethod
    def fresh(
        cls,
        kind: OptimizerKind,
        parameter_count: int,
        beta1: float = ADAM_BETA1,
        beta2: float = ADAM_BETA2,
        epsilon: float = ADAM_EPSILON,
    ) -> "OptimizerState":
        """Create zero state for a network with parameter_count parameters."""
        if kind is OptimizerKind.SGD:
            return cls(kind=kind)
        return cls(
            kind=kind,
            first_moment=np.zeros(parameter_count),
            second_moment=np.zeros(parameter_count),
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )

    def check_length(self, parameter_count: int) -> None:
        if self.kind is OptimizerKind.ADAM and self.first_moment.shape != (parameter_count,):
            raise ShapeError(
                f"Adam moments of length {self.first_moment.size} do not match "
                f"{parameter_count} parameters"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "step_count": self.step_count,
            "first_moment": encode_array(self.first_moment),
            "second_moment": encode_array(self.second_moment),
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OptimizerState":
        return cls(
            kind=OptimizerKind(data["kind"]),
            step_count=int(data["step_count"]),
            first_moment=decode_array(data["first_moment"]),
            second_moment=decode_array(data["second_moment"]),
            beta1=float(data["beta1"]),
            beta2=float(data["beta2"]),
            epsilon=float(data["epsilon"]),
        )


def optimizer_step(
    params: np.ndarray,
    gradient: np.ndarray,
    learning_rate: float,
    state: OptimizerState,
) -> tuple[np.ndarray, OptimizerState]:
    """
    Apply one optimizer step without mutating its inputs.

    Returns:
        (new parameters, new optimizer state).
    """
    if gradient.shape != params.shape:
        raise ShapeError(f"Gradient shape {gradient.shape} != parameter shape {params.shape}")

    if state.kind is OptimizerKind.SGD:
        return params - learning_rate * gradient, replace(state, step_count=state.step_count + 1)

    state.check_length(params.shape[0])
    step = state.step_count + 1
    first = state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient
    second = state.beta2 * state.second_moment + (1.0 - state.beta2) * (gradient * gradient)
    first_hat = first / (1.0 - state.beta1 ** step)
    second_hat = second / (1.0 - state.beta2 ** step)
    new_params = params - learning_rate * first_hat / (np.sqrt(second_hat) + state.epsilon)
    return new_params, replace(state, step_count=step, first_moment=first, second_moment=second)
