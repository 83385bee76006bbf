"""CSV/JSON emission with fixed, byte-stable number formatting."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np

from .configfile import config_dict
from .experiments import SERIES_COLUMNS, RunReport, SweepResult

CELL_COLUMNS = ("engine", "W", "L_max", "M", "K")
SUMMARY_COLUMNS = CELL_COLUMNS + (
    "n_seeds",
    "cumulative_success",
    "cumulative_success_raw",
    "cumulative_success_eq15",
    "discovery_probability",
    "avg_delay_s",
    "tradeoff",
    "tradeoff_raw",
    "tradeoff_eq15",
    "cumulative_success_stderr",
    "avg_delay_stderr",
    "dropped",
    "pending",
    "error",
)


@dataclass
class OutputBundle:
    summary: dict
    columns: tuple[str, ...]
    series: list[dict] = field(default_factory=list)


def scalar(value):
    """Plain-Python JSON value: ints stay ints, NaN becomes None."""
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return None if math.isnan(v) else v
    return value


def csv_cell(value) -> str:
    v = scalar(value)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)  # shortest round-trip decimal
    return str(v)


def _cell_labels(report: RunReport) -> dict:
    c = report.config
    return {
        "engine": report.engine.value,
        "W": c.backoff_window,
        "L_max": c.max_transmissions,
        "M": c.total_ues,
        "K": c.dz_count,
    }


def _summary_row(report: RunReport | None, labels: dict, error: str | None = None) -> dict:
    row = {k: None for k in SUMMARY_COLUMNS}
    row.update(labels)
    row["error"] = error
    if report is None:
        return row
    row.update(_cell_labels(report))
    row.update(
        n_seeds=report.n_seeds,
        cumulative_success=report.cumulative_success,
        cumulative_success_raw=report.cumulative_success_raw,
        cumulative_success_eq15=report.cumulative_success_eq15,
        discovery_probability=report.discovery_probability,
        avg_delay_s=report.average_delay,
        tradeoff=report.tradeoff,
        tradeoff_raw=report.tradeoff_raw,
        tradeoff_eq15=report.tradeoff_eq15,
        cumulative_success_stderr=report.cumulative_success_stderr,
        avg_delay_stderr=report.average_delay_stderr,
        dropped=report.dropped,
        pending=report.pending,
    )
    return row


def run_bundle(report: RunReport) -> OutputBundle:
    """One engine on one configuration: per-DZ rows plus a summary document."""
    summary = {
        "engine": report.engine.value,
        "config": config_dict(report.config),
        "seeds": list(report.seeds),
    }
    summary.update({k: v for k, v in _summary_row(report, {}).items() if k not in CELL_COLUMNS})
    del summary["error"]
    return OutputBundle(summary, SERIES_COLUMNS, report.series.rows())


def _sweep_header(result: SweepResult) -> dict:
    spec = result.spec
    return {
        "sweep": spec.name,
        "axis": list(spec.axis),
        "values": [list(v) for v in spec.values],
        "engines": [e.value for e in spec.engines],
        "mc_seeds": spec.mc_seeds,
        "seed": spec.seed,
        "base_config": config_dict(spec.base),
    }


def sweep_bundle(result: SweepResult) -> OutputBundle:
    """One row per (sweep point, engine)."""
    rows = [_summary_row(c.report, {"engine": c.engine.value, **c.point}, c.error) for c in result.cells]
    return OutputBundle(_sweep_header(result), SUMMARY_COLUMNS, rows)


def sweep_series_bundle(result: SweepResult) -> OutputBundle:
    """Per-DZ rows of every (sweep point, engine) cell, prefixed by the cell labels."""
    rows = []
    for c in result.cells:
        if c.report is None:
            continue
        labels = _cell_labels(c.report)
        rows.extend({**labels, **r} for r in c.report.series.rows())
    summary = _sweep_header(result)
    summary["cells"] = [
        _summary_row(c.report, {"engine": c.engine.value, **c.point}, c.error) for c in result.cells
    ]
    return OutputBundle(summary, CELL_COLUMNS + SERIES_COLUMNS, rows)


def render_csv(bundle: OutputBundle) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(bundle.columns)
    for row in bundle.series:
        writer.writerow([csv_cell(row.get(c)) for c in bundle.columns])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return scalar(obj)


def render_json(bundle: OutputBundle) -> str:
    doc = {
        "summary": _jsonable(bundle.summary),
        "columns": list(bundle.columns),
        "series": [_jsonable({c: r.get(c) for c in bundle.columns}) for r in bundle.series],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit(bundle: OutputBundle, fmt: str = "csv", destination: str | Path | IO[str] | None = None) -> str:
    """Render ``bundle`` and write it to ``destination`` (path or text stream)."""
    if fmt == "csv":
        text = render_csv(bundle)
    elif fmt == "json":
        text = render_json(bundle)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None:
        return text
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        destination.write(text)
    return text
