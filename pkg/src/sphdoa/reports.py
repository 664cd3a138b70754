"""Benchmark report serialization.

CSV is the flat per-cell table; JSON carries the same cells plus the
full configuration echo and version, and round-trips through
`load_report`.  Both writers are deterministic: identical reports
produce identical bytes.
"""

import csv
import json
from pathlib import Path

from .pipeline import BenchmarkCell, BenchmarkReport

__all__ = ["emit_report", "load_report", "report_rows"]

CSV_HEADER = ("scheme", "spacing_deg", "median_error_deg", "trials", "seed")


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def report_rows(report):
    """CSV rows as tuples of strings, in the report's cell order."""
    rows = []
    for cell in report.cells:
        rows.append(
            (
                cell.scheme,
                f"{cell.spacing_deg:g}",
                f"{cell.median_error_deg:.6f}",
                str(cell.trials),
                str(cell.seed),
            )
        )
    return rows


def _report_dict(report):
    return {
        "version": report.version,
        "seed": report.seed,
        "trials": report.trials,
        "schemes": list(report.schemes),
        "spacings": list(report.spacings),
        "config": _jsonable(report.config),
        "results": [
            {
                "scheme": cell.scheme,
                "spacing_deg": cell.spacing_deg,
                "median_error_deg": cell.median_error_deg,
                "trials": cell.trials,
                "n_failed": cell.n_failed,
                "seed": cell.seed,
            }
            for cell in report.cells
        ],
    }


def _format_of(path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown report format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".json":
        return "json"
    raise ValueError(f"cannot infer report format from {path!r}; pass fmt")


def emit_report(report, path, fmt=None):
    """Write a benchmark report to `path` as CSV or JSON.

    The format comes from the file suffix unless `fmt` forces it.
    I/O problems are re-raised with the path attached.
    """
    fmt = _format_of(path, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if fmt == "csv":
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_HEADER)
                writer.writerows(report_rows(report))
            else:
                json.dump(_report_dict(report), fh, indent=2, sort_keys=True)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def load_report(path):
    """Read back a JSON benchmark report written by `emit_report`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc}") from exc
    cells = tuple(
        BenchmarkCell(
            scheme=row["scheme"],
            spacing_deg=float(row["spacing_deg"]),
            median_error_deg=float(row["median_error_deg"]),
            trials=int(row["trials"]),
            n_failed=int(row["n_failed"]),
            seed=int(row["seed"]),
        )
        for row in data["results"]
    )
    return BenchmarkReport(
        cells=cells,
        schemes=tuple(data["schemes"]),
        spacings=tuple(float(s) for s in data["spacings"]),
        trials=int(data["trials"]),
        seed=int(data["seed"]),
        config=data["config"],
        version=data["version"],
    )
