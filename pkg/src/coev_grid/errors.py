"""
Error Types

Exception hierarchy shared by every coev-grid component.
"""

from typing import Any, Optional


class CoevGridError(Exception):
    """Base class for all coev-grid errors."""


class ShapeError(CoevGridError, ValueError):
    """A vector or batch does not match the expected network shape."""


class NumericError(CoevGridError, ArithmeticError):
    """
    A forward pass, gradient or update produced NaN/Inf.

    Carries the cell and iteration of the individual involved so the
    incident can be logged and the coevolution step rolled back.
    """

    def __init__(
        self,
        message: str,
        cell: Optional[Any] = None,
        iteration: Optional[int] = None,
    ):
        self.cell = cell
        self.iteration = iteration
        context = []
        if cell is not None:
            context.append(f"cell={cell}")
        if iteration is not None:
            context.append(f"iteration={iteration}")
        suffix = f" ({', '.join(context)})" if context else ""
        super().__init__(f"{message}{suffix}")


class SelectionError(CoevGridError, ValueError):
    """Selection or opponent sampling cannot proceed."""


class MetricError(CoevGridError, ValueError):
    """A metric was given inputs it cannot score."""


class ConfigError(CoevGridError, ValueError):
    """A configuration value is missing, unknown or out of range."""

    def __init__(self, key: str, constraint: str):
        self.key = key
        self.constraint = constraint
        super().__init__(f"{key}: {constraint}")


class ProtocolError(CoevGridError, ValueError):
    """A wire document could not be decoded."""


class TransportError(CoevGridError, ConnectionError):
    """A neighbor or client could not be reached."""


class ExperimentAborted(CoevGridError, RuntimeError):
    """The master terminated the experiment under the abort policy."""
