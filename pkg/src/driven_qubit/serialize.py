"""CSV and JSON serialization of trajectories, energy series and schedules.

CSV files carry a mandatory header row; lines starting with ``#`` are
comments.  Floating-point values are written with 17 significant digits
so a write/read cycle reproduces every sample bit-exactly.  JSON files
are objects with ``schema_version``, ``config``, ``columns`` and
``rows`` keys.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .energy import EnergySeries
from .experiments import ZenoSchedule

__all__ = [
    "SCHEMA_VERSION",
    "Table",
    "trajectory_table",
    "energy_table",
    "schedule_table",
    "write_table",
    "read_table",
    "write_schedule_json",
    "read_schedule_json",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Table:
    """A named-column table of floats plus a free-form config dict."""

    columns: tuple[str, ...]
    rows: np.ndarray  # shape (n, len(columns))
    config: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.size == 0:
            rows = rows.reshape(0, len(self.columns))
        if rows.shape[1] != len(self.columns):
            raise ValueError(
                f"{rows.shape[1]} row fields for {len(self.columns)} columns")
        object.__setattr__(self, "rows", rows)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def trajectory_table(traj: Trajectory) -> Table:
    cols = ("tau", "alpha", "delta", "theta", "drive_value", "H")
    rows = np.column_stack([traj.taus, traj.alphas, traj.deltas, traj.thetas,
                            traj.drive_values(), traj.hamiltonian()])
    return Table(cols, rows, {
        "drive_kind": traj.drive.kind,
        "drive_value": traj.drive.value,
        "K": traj.params.K,
    })


def energy_table(series: EnergySeries, config: dict | None = None) -> Table:
    cols = ("tau", "H_mean", "E_a", "E_b", "sigma_a", "sigma_b",
            "V_expect", "sigma_q", "drive_value", "alpha")
    rows = np.column_stack([getattr(series, c) for c in cols]) if len(series) \
        else np.empty((0, len(cols)))
    return Table(cols, rows, dict(config or {}))


def schedule_table(schedule: ZenoSchedule) -> Table:
    """Schedule segments as rows; a NaN tau_jump marks an endless segment."""
    cols = ("freeze_level", "tau_start", "tau_jump", "window_lo", "window_hi")
    rows = []
    windows = iter(schedule.jump_windows)
    for seg in schedule.segments:
        if seg.tau_jump is None:
            rows.append([seg.freeze_level, seg.tau_start,
                         math.nan, math.nan, math.nan])
        else:
            lo, hi = next(windows)
            rows.append([seg.freeze_level, seg.tau_start, seg.tau_jump, lo, hi])
    return Table(cols, np.array(rows).reshape(len(rows), len(cols)), {
        "amplitude": schedule.amplitude,
        "delta_tau_min": schedule.delta_tau_min,
    })


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_table(table: Table, path: str | Path, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            for key in sorted(table.config):
                fh.write(f"# {key} = {table.config[key]}\n")
            w = csv.writer(fh)
            w.writerow(table.columns)
            for row in table.rows:
                w.writerow([_fmt(x) for x in row])
    elif fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": table.config,
            "columns": list(table.columns),
            "rows": table.rows.tolist(),
        }
        path.write_text(json.dumps(payload, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_table(path: str | Path) -> Table:
    """Read back a table written by write_table (format from the content)."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version in {path}")
        return Table(tuple(payload["columns"]),
                     np.array(payload["rows"], dtype=float).reshape(
                         -1, len(payload["columns"])),
                     payload.get("config", {}))
    config: dict = {}
    header: tuple[str, ...] | None = None
    rows: list[list[float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                k, v = body.split("=", 1)
                config[k.strip()] = _parse_config_value(v.strip())
            continue
        fields = next(csv.reader([line]))
        if header is None:
            header = tuple(f.strip() for f in fields)
            continue
        rows.append([float(f) for f in fields])
    if header is None:
        raise ValueError(f"{path} has no header row")
    arr = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return Table(header, arr.reshape(-1, len(header)), config)


def _parse_config_value(v: str):
    try:
        f = float(v)
    except ValueError:
        return v
    return int(f) if f.is_integer() and "." not in v and "e" not in v.lower() else f


def write_schedule_json(schedule: ZenoSchedule, path: str | Path) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": {"amplitude": schedule.amplitude},
        "delta_tau_min": schedule.delta_tau_min,
        "segments": [
            {"freeze_level": s.freeze_level, "tau_start": s.tau_start,
             "tau_jump": s.tau_jump}
            for s in schedule.segments
        ],
        "jump_windows": [list(w) for w in schedule.jump_windows],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_schedule_json(path: str | Path) -> ZenoSchedule:
    from .experiments import ZenoSegment

    payload = json.loads(Path(path).read_text())
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version in {path}")
    return ZenoSchedule(
        amplitude=payload["config"]["amplitude"],
        segments=[ZenoSegment(s["freeze_level"], s["tau_start"], s["tau_jump"])
                  for s in payload["segments"]],
        jump_windows=[tuple(w) for w in payload["jump_windows"]],
        delta_tau_min=payload["delta_tau_min"],
    )
