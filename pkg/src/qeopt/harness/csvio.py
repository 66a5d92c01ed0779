"""Versioned CSV files.

Line 1 is a metadata comment naming the schema version and column units,
line 2 the column header. Floats are written with repr() so parsing is
bit-exact; infinities appear as ``inf``.
"""

from __future__ import annotations

import csv
from pathlib import Path

SCHEMA_RESULTS = "qeopt-results/1"
SCHEMA_DETAIL = "qeopt-detail/1"
SCHEMA_FITS = "qeopt-fits/1"
SCHEMA_SCALING = "qeopt-scaling/1"
SCHEMA_GAPS = "qeopt-gaps/1"
SCHEMA_GAPDETAIL = "qeopt-gapdetail/1"
SCHEMA_LEDGER = "qeopt-ledger/1"

UNITS = "length:steps;effort:proposals;temperature:absolute;energy:objective"

RESULTS_COLUMNS = [
    "method", "n", "length", "replicas", "m_q", "ensemble", "instances",
    "repeats", "trials", "successes_best", "successes_final", "p_s",
    "p_s_halfwidth", "repeats_needed", "effort", "total_proposals",
]
DETAIL_COLUMNS = [
    "method", "n", "length", "replicas", "m_q", "ensemble", "instance",
    "repeat", "seed", "success_best", "success_final", "best_energy",
    "final_energy", "proposals",
]
FITS_COLUMNS = [
    "method", "n", "replicas", "m_q", "l_star", "fit_a", "fit_b", "fit_c",
    "subset_size", "subset_lengths", "vertex_from_fit",
]
SCALING_COLUMNS = [
    "method", "n", "replicas", "m_q", "l_star", "l_eval", "p_s",
    "p_s_halfwidth", "repeats_needed", "effort", "effort_lo", "effort_hi",
    "instances", "repeats",
]
GAPS_COLUMNS = [
    "n", "kernel", "temperature", "instances", "delta_mean", "delta_stderr",
    "delta_min", "delta_max", "tau_lower_mean", "tau_upper_mean",
]
GAPDETAIL_COLUMNS = [
    "n", "kernel", "temperature", "instance", "seed", "delta", "tau_lower",
    "tau_upper",
]
LEDGER_COLUMNS = [
    "role", "ensemble", "method", "n", "length", "instance", "repeat",
    "entropy",
]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _header_line(schema: str) -> str:
    return f"# schema={schema} units={UNITS}"


def write_rows(path: str | Path, schema: str, columns: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(_header_line(schema) + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
    return path


def append_rows(path: str | Path, schema: str, columns: list[str], rows) -> Path:
    """Append for incremental (crash-safe) persistence; creates the header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists()
    with open(path, "a", newline="") as fh:
        if fresh:
            fh.write(_header_line(schema) + "\n")
            csv.writer(fh).writerow(columns)
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
        fh.flush()
    return path


def read_rows(path: str | Path) -> tuple[str, list[str], list[dict]]:
    """Returns (schema, columns, rows-as-string-dicts)."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema="):
            raise ValueError(f"{path}: missing schema header line")
        schema = first.removeprefix("# schema=").split()[0]
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [dict(zip(columns, rec)) for rec in reader if rec]
    return schema, columns, rows
