"""Readers for the simulation CLI's CSV/JSON table and schedule formats.

CSV tables carry a mandatory header row, ``#`` comment lines and
``# key = value`` config entries.  JSON tables are objects with
``schema_version``, ``config``, ``columns`` and ``rows``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


class DataError(ValueError):
    """A data file is missing, empty, or lacks required columns."""


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: np.ndarray
    config: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(f"missing column {name!r} (have {list(self.columns)})")
        return self.rows[:, self.columns.index(name)]

    def require(self, *names: str) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise DataError(f"missing columns {missing} (have {list(self.columns)})")
        if len(self.rows) == 0:
            raise DataError("table has no data rows")


def read_table(path: str | Path) -> Table:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such data file: {path}")
    text = path.read_text()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise DataError(f"unsupported schema_version in {path}")
        cols = tuple(payload["columns"])
        rows = np.array(payload["rows"], dtype=float).reshape(-1, len(cols))
        return Table(cols, rows, payload.get("config", {}))
    header: tuple[str, ...] | None = None
    config: dict = {}
    rows: list[list[float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, value = body.split("=", 1)
                config[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([line]))
        if header is None:
            header = tuple(f.strip() for f in fields)
            continue
        rows.append([float(f) for f in fields])
    if header is None:
        raise DataError(f"{path} has no header row")
    arr = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return Table(header, arr.reshape(-1, len(header)), config)


def read_schedule(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such schedule file: {path}")
    payload = json.loads(path.read_text())
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported schema_version in {path}")
    for key in ("segments", "jump_windows", "delta_tau_min"):
        if key not in payload:
            raise DataError(f"schedule file {path} lacks {key!r}")
    return payload


def read_markers(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such markers file: {path}")
    payload = json.loads(path.read_text())
    for key in ("jump_tau", "window_lo", "window_hi"):
        if key not in payload:
            raise DataError(f"markers file {path} lacks {key!r}")
    return payload
