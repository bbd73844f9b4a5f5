"""
Wire Documents

Published cell snapshots, client state and experiment requests, with their
JSON forms. Arrays travel as base64 IEEE-754 bytes so every real survives
the round-trip bit-exactly.
"""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Optional
import uuid

from coev_grid.config.settings import ExperimentConfig, build_config
from coev_grid.errors import ConfigError, ProtocolError
from coev_grid.grid.topology import CellId, neighborhood_of
from coev_grid.mixture.weights import MixtureWeights
from coev_grid.nn.individual import Individual, Role


@dataclass(frozen=True, eq=False)
class CellSnapshot:
    """The atomically published state of one cell."""
    cell: CellId
    iteration: int
    generator: Individual
    discriminator: Individual
    weights_g: MixtureWeights
    weights_d: MixtureWeights
    mixture_score: Optional[float] = None

    def __post_init__(self) -> None:
        if self.iteration < 0:
            raise ValueError(f"iteration must be >= 0, got {self.iteration}")
        if self.generator.role is not Role.GENERATOR:
            raise ValueError("Snapshot generator has the wrong role")
        if self.discriminator.role is not Role.DISCRIMINATOR:
            raise ValueError("Snapshot discriminator has the wrong role")

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": str(self.cell),
            "iteration": self.iteration,
            "generator": self.generator.to_dict(),
            "discriminator": self.discriminator.to_dict(),
            "weights_g": self.weights_g.to_dict(),
            "weights_d": self.weights_d.to_dict(),
            "mixture_score": self.mixture_score,
        }

    def role_slice(self, role: Role) -> dict[str, Any]:
        """The part of the snapshot served by the per-role parameter routes."""
        individual = self.generator if role is Role.GENERATOR else self.discriminator
        weights = self.weights_g if role is Role.GENERATOR else self.weights_d
        return {
            "cell": str(self.cell),
            "iteration": self.iteration,
            "individual": individual.to_dict(),
            "weights": weights.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CellSnapshot":
        try:
            score = data.get("mixture_score")
            return cls(
                cell=CellId.parse(data["cell"]),
                iteration=int(data["iteration"]),
                generator=Individual.from_dict(data["generator"]),
                discriminator=Individual.from_dict(data["discriminator"]),
                weights_g=MixtureWeights.from_dict(data["weights_g"]),
                weights_d=MixtureWeights.from_dict(data["weights_d"]),
                mixture_score=None if score is None else float(score),
            )
        except ProtocolError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise ProtocolError(f"Malformed cell snapshot: {e!r}") from e


def individual_from_slice(data: dict[str, Any]) -> Individual:
    """Decode the individual of a per-role parameter document."""
    try:
        return Individual.from_dict(data["individual"])
    except ProtocolError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ProtocolError(f"Malformed parameter document: {e!r}") from e


class ClientStatus(Enum):
    """Client lifecycle; idle -> busy on an accepted experiment, back on completion."""
    IDLE = "idle"
    BUSY = "busy"


@dataclass
class ClientState:
    """What GET /status reports."""
    state: ClientStatus = ClientStatus.IDLE
    experiment_id: Optional[str] = None
    last_heartbeat: datetime = field(default_factory=datetime.now)
    cell: Optional[CellId] = None
    iteration: Optional[int] = None
    last_experiment_id: Optional[str] = None
    last_outcome: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "state": self.state.value,
            "experiment_id": self.experiment_id,
            "last_heartbeat": self.last_heartbeat.isoformat(),
            "cell": None if self.cell is None else str(self.cell),
            "iteration": self.iteration,
            "last_experiment_id": self.last_experiment_id,
            "last_outcome": self.last_outcome,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ClientState":
        try:
            cell = data.get("cell")
            return cls(
                state=ClientStatus(data["state"]),
                experiment_id=data.get("experiment_id"),
                last_heartbeat=datetime.fromisoformat(data["last_heartbeat"]),
                cell=None if cell is None else CellId.parse(cell),
                iteration=data.get("iteration"),
                last_experiment_id=data.get("last_experiment_id"),
                last_outcome=data.get("last_outcome"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ProtocolError(f"Malformed client state: {e!r}") from e


@dataclass(frozen=True)
class ExperimentRequest:
    """Everything a client needs to run one cell of an experiment."""
    experiment_id: str
    config: ExperimentConfig
    assigned_cell: CellId
    neighbor_addresses: dict[CellId, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        grid = self.config.grid_spec
        if not grid.contains(self.assigned_cell):
            raise ConfigError("assigned_cell", f"{self.assigned_cell} is outside the {grid} grid")
        spec = neighborhood_of(grid, self.assigned_cell, self.config.grid.neighborhood_size)
        missing = [c for c in spec.neighbors if c not in self.neighbor_addresses]
        if missing:
            raise ConfigError(
                "neighbor_addresses",
                f"no address for neighbors {', '.join(str(c) for c in missing)}",
            )

    @classmethod
    def new_id(cls) -> str:
        return uuid.uuid4().hex[:12]

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment_id": self.experiment_id,
            "config": self.config.model_dump(mode="json"),
            "assigned_cell": str(self.assigned_cell),
            "neighbor_addresses": {
                str(cell): address for cell, address in sorted(self.neighbor_addresses.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentRequest":
        """Decode a request body; ConfigError and ProtocolError map to HTTP 400."""
        if not isinstance(data, dict):
            raise ProtocolError("Experiment request must be a JSON object")
        try:
            experiment_id = str(data["experiment_id"])
            assigned = CellId.parse(data["assigned_cell"])
            addresses = {
                CellId.parse(cell): str(address)
                for cell, address in (data.get("neighbor_addresses") or {}).items()
            }
            config_data = data.get("config") or {}
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise ProtocolError(f"Malformed experiment request: {e!r}") from e
        return cls(
            experiment_id=experiment_id,
            config=build_config(config_data),
            assigned_cell=assigned,
            neighbor_addresses=addresses,
        )
