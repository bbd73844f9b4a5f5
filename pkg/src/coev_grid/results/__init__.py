"""Run records, ranking and result artifacts."""

from coev_grid.results.records import (
    CSV_COLUMNS,
    CellResult,
    CellStatus,
    IterationRecord,
    RunReport,
    build_heatmap,
    rank_results,
)
from coev_grid.results.writer import ResultsWriter, read_cell_history, read_samples

__all__ = [
    "CSV_COLUMNS",
    "CellResult",
    "CellStatus",
    "IterationRecord",
    "ResultsWriter",
    "RunReport",
    "build_heatmap",
    "rank_results",
    "read_cell_history",
    "read_samples",
]
