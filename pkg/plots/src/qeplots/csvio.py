"""Reader for the harness's versioned CSV format.

Line 1: ``# schema=<name>/<version> units=...``; line 2: column header.
This module deliberately does not import the producer package; the file
format is the interface.
"""

from __future__ import annotations

import csv
from pathlib import Path


class SchemaError(ValueError):
    """Wrong or missing schema version, or missing columns."""


def read_table(path: str | Path) -> tuple[str, list[str], list[dict]]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema="):
            raise SchemaError(f"{path}: missing '# schema=' header line")
        schema = first.removeprefix("# schema=").split()[0]
        reader = csv.reader(fh)
        try:
            columns = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: missing column header")
        rows = [dict(zip(columns, rec)) for rec in reader if rec]
    return schema, columns, rows


def require_schema(path: str | Path, schema: str, expected: set[str]) -> None:
    if schema not in expected:
        raise SchemaError(
            f"{path}: schema {schema!r} not accepted here (expected one of "
            f"{sorted(expected)})"
        )


def require_columns(path: str | Path, columns: list[str], needed: set[str]) -> None:
    missing = needed - set(columns)
    if missing:
        raise SchemaError(f"{path}: missing columns {sorted(missing)}")


def fnum(row: dict, key: str) -> float:
    return float(row[key])


def inum(row: dict, key: str) -> int:
    return int(row[key])
