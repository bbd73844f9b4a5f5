"""
Results Writer

Persists a finished run: per-cell metric CSVs, per-cell result JSON, the
per-iteration grid heat map, the winner's samples and the run report.

Output layout::

    <output_dir>/
        report.json
        heatmap.json
        winner_samples.txt
        cells/cell_<row>_<col>.csv
        cells/cell_<row>_<col>.json
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Mapping, Optional, Union
import csv
import json
import logging

import numpy as np

from coev_grid.grid.topology import CellId
from coev_grid.results.records import (
    CSV_COLUMNS,
    CellResult,
    IterationRecord,
    RunReport,
    build_heatmap,
)

logger = logging.getLogger(__name__)


class ResultsWriter:
    """Single writer of a run's output directory."""

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)
        self.cells_dir = self.output_dir / "cells"

    def _prepare(self) -> None:
        try:
            self.cells_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OSError(f"Cannot create output directory {self.cells_dir}: {e}") from e

    def _write_json(self, path: Path, data: Any) -> Path:
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2)
        except OSError as e:
            raise OSError(f"Cannot write {path}: {e}") from e
        return path

    def cell_stem(self, cell: CellId) -> str:
        return f"cell_{cell.row}_{cell.col}"

    def write_cell_history(self, cell: CellId, history: list[IterationRecord]) -> Path:
        """Write one CSV row per iteration."""
        self._prepare()
        path = self.cells_dir / f"{self.cell_stem(cell)}.csv"
        try:
            with open(path, "w", newline="", encoding="utf-8") as f:
                writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
                writer.writeheader()
                for record in history:
                    writer.writerow({
                        k: ("" if v is None else v) for k, v in record.to_row().items()
                    })
        except OSError as e:
            raise OSError(f"Cannot write {path}: {e}") from e
        return path

    def write_cell_result(self, result: CellResult) -> Path:
        self._prepare()
        return self._write_json(
            self.cells_dir / f"{self.cell_stem(result.cell)}.json", result.to_dict()
        )

    def write_heatmap(self, results: Mapping[CellId, CellResult]) -> Path:
        self._prepare()
        return self._write_json(self.output_dir / "heatmap.json", build_heatmap(results))

    def write_samples(self, samples: np.ndarray, name: str = "winner_samples.txt") -> Path:
        """Plain-text point list, one sample per line."""
        self._prepare()
        path = self.output_dir / name
        try:
            with open(path, "w", encoding="utf-8") as f:
                for point in np.atleast_2d(samples):
                    f.write(" ".join(repr(float(x)) for x in point) + "\n")
        except OSError as e:
            raise OSError(f"Cannot write {path}: {e}") from e
        return path

    def write_report(self, report: RunReport) -> Path:
        self._prepare()
        return self._write_json(self.output_dir / "report.json", report.to_dict())

    def emit_logs(
        self,
        report: RunReport,
        results: Mapping[CellId, CellResult],
        winner_samples: Optional[np.ndarray] = None,
    ) -> RunReport:
        """
        Write every artifact of a run and fill in the report's paths.

        Args:
            report: Ranked report of the run.
            results: Results of every cell that returned any.
            winner_samples: Samples of the winning mixture; defaults to the
                samples stored on the winner's result.

        Returns:
            The report with CSV and sample paths set.
        """
        for cell, result in sorted(results.items()):
            report.csv_paths[str(cell)] = str(self.write_cell_history(cell, result.history))
            self.write_cell_result(result)
        self.write_heatmap(results)

        if winner_samples is None and report.winner is not None:
            winner_samples = results[CellId.parse(report.winner)].samples
        if winner_samples is not None:
            report.winner_samples_path = str(self.write_samples(winner_samples))

        report.finished_at = report.finished_at or datetime.now()
        self.write_report(report)
        logger.info(
            f"Wrote results of {len(results)} cells to {self.output_dir} "
            f"(winner: {report.winner or 'none'})"
        )
        return report


def read_cell_history(path: Union[str, Path]) -> list[IterationRecord]:
    """Parse a cell CSV written by :class:`ResultsWriter`."""
    with open(path, newline="", encoding="utf-8") as f:
        return [IterationRecord.from_row(row) for row in csv.DictReader(f)]


def read_samples(path: Union[str, Path]) -> np.ndarray:
    return np.loadtxt(path, ndmin=2)
