"""Shared helpers for building synthetic figure data files."""

import csv
import math
from pathlib import Path

import numpy as np

BAND_COLUMNS = ("tau", "H_mean", "H_env", "band_lower", "band_upper",
                "sigma_a_upper", "sigma_a_lower",
                "sigma_b_upper", "sigma_b_lower")


def write_csv(path: Path, columns, rows, config=None):
    with path.open("w", newline="") as fh:
        for key in sorted(config or {}):
            fh.write(f"# {key} = {config[key]}\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([format(float(x), ".17g") for x in row])


def synthetic_band_rows(n=200, period=100.0):
    """A toy band with the right shape: cosine envelope, sine width."""
    tau = np.linspace(0.0, period, n)
    h = np.cos(2 * math.pi * tau / period)
    sig = np.abs(np.sin(2 * math.pi * tau / period))
    return np.column_stack([tau, h, h, h - sig, h + sig,
                            h + 0.9 * sig, h - 0.9 * sig,
                            h + 0.8 * sig, h - 0.8 * sig])
