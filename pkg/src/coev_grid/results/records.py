"""
Run Records

Per-iteration metric rows, per-cell final results and the ranked run report.
"""

from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Mapping, Optional
import math

import numpy as np

from coev_grid.codec import decode_array, encode_array
from coev_grid.grid.topology import CellId
from coev_grid.mixture.generators import GeneratorMixture

CSV_COLUMNS = (
    "iteration",
    "cell",
    "frechet_proxy",
    "tvd",
    "mode_coverage",
    "generator_fitness",
    "discriminator_fitness",
    "learning_rate_g",
    "learning_rate_d",
    "mixture_score",
    "generator_diversity",
    "fetches",
    "stale_neighbors",
    "iteration_seconds",
)


@dataclass(frozen=True)
class IterationRecord:
    """Metrics of one cell after one iteration; one CSV row."""
    iteration: int
    cell: CellId
    frechet_proxy: float
    tvd: float
    mode_coverage: int
    generator_fitness: Optional[float]
    discriminator_fitness: Optional[float]
    learning_rate_g: float
    learning_rate_d: float
    mixture_score: Optional[float]
    generator_diversity: float
    fetches: int = 0
    stale_neighbors: int = 0
    iteration_seconds: float = 0.0

    def to_row(self) -> dict[str, Any]:
        row = asdict(self)
        row["cell"] = str(self.cell)
        return row

    @classmethod
    def from_row(cls, row: Mapping[str, Any]) -> "IterationRecord":
        """Parse a CSV row (all strings) or a JSON row."""
        def real(key: str) -> Optional[float]:
            value = row[key]
            if value is None or value == "":
                return None
            return float(value)

        return cls(
            iteration=int(row["iteration"]),
            cell=CellId.parse(str(row["cell"])),
            frechet_proxy=float(row["frechet_proxy"]),
            tvd=float(row["tvd"]),
            mode_coverage=int(row["mode_coverage"]),
            generator_fitness=real("generator_fitness"),
            discriminator_fitness=real("discriminator_fitness"),
            learning_rate_g=float(row["learning_rate_g"]),
            learning_rate_d=float(row["learning_rate_d"]),
            mixture_score=real("mixture_score"),
            generator_diversity=float(row["generator_diversity"]),
            fetches=int(row.get("fetches", 0) or 0),
            stale_neighbors=int(row.get("stale_neighbors", 0) or 0),
            iteration_seconds=float(row.get("iteration_seconds", 0.0) or 0.0),
        )


class CellStatus(Enum):
    """Final state of a cell's run."""
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class CellResult:
    """Final output of one cell: its scored mixture, samples and history."""
    cell: CellId
    status: CellStatus
    mixture: Optional[GeneratorMixture] = None
    samples: Optional[np.ndarray] = None
    history: list[IterationRecord] = field(default_factory=list)
    replacements: list[dict[str, Any]] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def score(self) -> Optional[float]:
        return None if self.mixture is None else self.mixture.score

    @property
    def completed(self) -> bool:
        return self.status is CellStatus.COMPLETED

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": str(self.cell),
            "status": self.status.value,
            "score": self.score,
            "mixture": None if self.mixture is None else self.mixture.to_dict(),
            "samples": None if self.samples is None else encode_array(self.samples),
            "history": [record.to_row() for record in self.history],
            "replacements": list(self.replacements),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CellResult":
        mixture = data.get("mixture")
        samples = data.get("samples")
        return cls(
            cell=CellId.parse(data["cell"]),
            status=CellStatus(data["status"]),
            mixture=None if mixture is None else GeneratorMixture.from_dict(mixture),
            samples=None if samples is None else decode_array(samples),
            history=[IterationRecord.from_row(row) for row in data.get("history", [])],
            replacements=list(data.get("replacements", [])),
            error=data.get("error"),
        )


def rank_results(results: Mapping[CellId, CellResult]) -> list[CellId]:
    """Completed, scored cells ordered by ascending score; ties by cell id."""
    scored = [
        (result.score, cell)
        for cell, result in results.items()
        if result.completed and result.score is not None and math.isfinite(result.score)
    ]
    return [cell for _, cell in sorted(scored)]


def build_heatmap(results: Mapping[CellId, CellResult]) -> list[dict[str, Any]]:
    """Per-iteration grid snapshot of every cell's mixture score."""
    by_iteration: dict[int, dict[str, Optional[float]]] = {}
    for cell in sorted(results):
        for record in results[cell].history:
            by_iteration.setdefault(record.iteration, {})[str(cell)] = record.mixture_score
    return [
        {"iteration": iteration, "scores": scores}
        for iteration, scores in sorted(by_iteration.items())
    ]


@dataclass
class RunReport:
    """Summary of a finished experiment."""
    experiment_id: str
    rows: int
    cols: int
    final_scores: dict[str, Optional[float]] = field(default_factory=dict)
    ranking: list[str] = field(default_factory=list)
    csv_paths: dict[str, str] = field(default_factory=dict)
    winner_samples_path: Optional[str] = None
    failures: list[dict[str, str]] = field(default_factory=list)
    communication: dict[str, Any] = field(default_factory=dict)
    started_at: datetime = field(default_factory=datetime.now)
    finished_at: Optional[datetime] = None

    @property
    def winner(self) -> Optional[str]:
        return self.ranking[0] if self.ranking else None

    @classmethod
    def from_results(
        cls,
        experiment_id: str,
        rows: int,
        cols: int,
        results: Mapping[CellId, CellResult],
        failures: Optional[Mapping[CellId, str]] = None,
    ) -> "RunReport":
        """Rank the results and collect the failures of every cell."""
        failed = dict(failures or {})
        for cell, result in results.items():
            if not result.completed and cell not in failed:
                failed[cell] = result.error or "failed"
        return cls(
            experiment_id=experiment_id,
            rows=rows,
            cols=cols,
            final_scores={
                str(cell): result.score for cell, result in sorted(results.items())
                if result.completed
            },
            ranking=[str(cell) for cell in rank_results(results)],
            failures=[
                {"cell": str(cell), "reason": reason} for cell, reason in sorted(failed.items())
            ],
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment_id": self.experiment_id,
            "grid": {"rows": self.rows, "cols": self.cols},
            "final_scores": self.final_scores,
            "ranking": self.ranking,
            "winner": self.winner,
            "csv_paths": self.csv_paths,
            "winner_samples_path": self.winner_samples_path,
            "failures": self.failures,
            "communication": self.communication,
            "started_at": self.started_at.isoformat(),
            "finished_at": self.finished_at.isoformat() if self.finished_at else None,
        }
