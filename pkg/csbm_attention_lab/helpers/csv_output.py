"""
CSV emission for sweep results and diagnostic reports. Floats are written
with 9 significant digits; rows keep the in-memory order so a rerun with the
same seed reproduces the files byte for byte.
"""
import csv
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from she_logging import logger

from csbm_attention_lab.error_handler import OutputError
from csbm_attention_lab.models.sweep import (
    METRICS,
    AggregateRecord,
    DiagnosticRecord,
    ExperimentKind,
    Method,
    SweepResult,
)

TRIAL_COLUMNS: List[str] = [
    "experiment",
    "point",
    "grid_value",
    "trial",
    "method",
    "accuracy",
    "perfect",
    "intra_gamma_mean",
    "inter_gamma_mean",
    "intra_mass",
    "inter_mass",
    "sum_sq_gamma_median",
    "seed",
]
SUMMARY_COLUMNS: List[str] = [
    "experiment",
    "point",
    "grid_value",
    "method",
    "trials",
] + [f"{metric}_{moment}" for metric in METRICS for moment in ("mean", "std")]
DIAGNOSTIC_COLUMNS: List[str] = [
    "experiment",
    "point",
    "grid_value",
    "trial",
    "seed",
    "statistic",
    "center",
    "envelope",
    "max_deviation",
    "q05",
    "q50",
    "q95",
    "observations",
    "violation_count",
    "degenerate",
    "passed",
]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.9g}"
    if isinstance(value, (ExperimentKind, Method)):
        return value.value
    return str(value)


def summary_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}_summary{path.suffix}")


def diagnostics_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}_diagnostics{path.suffix}")


def write_rows(
    path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]
) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: format_value(v) for key, v in row.items()})
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from e
    logger.debug("Wrote %s", path)
    return path


def _summary_row(record: AggregateRecord) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "experiment": record.experiment,
        "point": record.point,
        "grid_value": record.grid_value,
        "method": record.method,
        "trials": record.trials,
    }
    for metric in METRICS:
        row[f"{metric}_mean"] = record.means[metric]
        row[f"{metric}_std"] = record.stds[metric]
    return row


def emit_csv(result: SweepResult, path: Path) -> Path:
    """Trial rows at `path`, per-point aggregates alongside with a _summary suffix."""
    path = Path(path)
    write_rows(path, TRIAL_COLUMNS, (record.dict() for record in result.trials))
    write_rows(
        summary_path(path),
        SUMMARY_COLUMNS,
        (_summary_row(record) for record in result.aggregates),
    )
    logger.info(
        "Wrote %d trial rows and %d summary rows",
        len(result.trials),
        len(result.aggregates),
        extra={"path": str(path)},
    )
    return path


def read_summary(path: Path) -> List[AggregateRecord]:
    path = Path(path)
    try:
        with path.open(newline="") as handle:
            rows = list(csv.DictReader(handle))
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from e
    return [
        AggregateRecord(
            experiment=row["experiment"],
            point=int(row["point"]),
            grid_value=float(row["grid_value"]),
            method=row["method"],
            trials=int(row["trials"]),
            means={metric: float(row[f"{metric}_mean"]) for metric in METRICS},
            stds={metric: float(row[f"{metric}_std"]) for metric in METRICS},
        )
        for row in rows
    ]


def _diagnostic_row(record: DiagnosticRecord) -> Dict[str, Any]:
    report = record.report
    return {
        "experiment": record.experiment,
        "point": record.point,
        "grid_value": record.grid_value,
        "trial": record.trial,
        "seed": record.seed,
        "statistic": report.statistic,
        "center": report.center,
        "envelope": report.envelope,
        "max_deviation": report.max_deviation,
        "q05": report.quantiles.get("q05"),
        "q50": report.quantiles.get("q50"),
        "q95": report.quantiles.get("q95"),
        "observations": report.observations,
        "violation_count": report.violation_count,
        "degenerate": report.degenerate,
        "passed": report.passed,
    }


def emit_diagnostics_csv(records: Sequence[DiagnosticRecord], path: Path) -> Path:
    return write_rows(
        path, DIAGNOSTIC_COLUMNS, (_diagnostic_row(record) for record in records)
    )
