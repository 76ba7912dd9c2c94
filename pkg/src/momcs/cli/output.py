"""
CSV and binary outputs of the commands.

Every CSV starts with a comment line `# master_seed=<seed> version=<version>`, then a fixed header row.
Floats are written with repr, which round-trips exactly.
"""
import csv
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from momcs import __version__
from momcs.recovery import RecoveryReport

from .plan import BenchRow, SummaryRow

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["iteration", "objective", "recon_error", "elapsed_seconds"]
BENCH_COLUMNS = ["scenario", "m", "algorithm", "M", "trial", "recon_error_per_pixel", "final_objective", "iterations", "wall_ms", "diverged"]
SUMMARY_COLUMNS = ["scenario", "m", "algorithm", "M", "trials", "diverged", "mean_recon_error", "ci95", "mean_final_objective"]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_csv(path: Union[str, Path], columns: Sequence[str], rows: Iterable[Dict[str, Any]], master_seed: Optional[int]) -> Path:
    """
    Write rows (mappings holding at least `columns`) under the seed comment and header lines.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# master_seed={master_seed} version={__version__}\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(column, "")) for column in columns])
    logger.info("Wrote %s", path)
    return path


def read_csv(path: Union[str, Path]) -> List[Dict[str, str]]:
    """Read a CSV written by `write_csv`, skipping comment lines."""
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(line for line in f if not line.startswith("#")))


def emit_trace(report: RecoveryReport, path: Union[str, Path]) -> Path:
    """
    Write the per-iteration trace of the chosen restart: iteration, objective, reconstruction error per pixel
    and elapsed seconds, one row per iteration.
    """
    rows = (
        {"iteration": index + 1, "objective": float(objective), "recon_error": float(error), "elapsed_seconds": float(elapsed)}
        for index, (objective, error, elapsed) in enumerate(zip(report.objective_trace, report.recon_error_trace, report.elapsed_trace))
    )
    return write_csv(path, TRACE_COLUMNS, rows, report.seed)


def write_results(rows: Sequence[BenchRow], path: Union[str, Path], master_seed: int) -> Path:
    return write_csv(path, BENCH_COLUMNS, (asdict(row) for row in rows), master_seed)


def write_summary(rows: Sequence[SummaryRow], path: Union[str, Path], master_seed: int) -> Path:
    return write_csv(path, SUMMARY_COLUMNS, (asdict(row) for row in rows), master_seed)
