import json

import numpy as np
import pytest

from figtools import BAND_COLUMNS, synthetic_band_rows, write_csv


@pytest.fixture
def synthetic_dir(tmp_path):
    """A directory holding plausible data files for all four figures."""
    rows = synthetic_band_rows()
    write_csv(tmp_path / "fig1.csv", BAND_COLUMNS, rows,
              {"amplitude": 8e-3, "drive": "sin"})
    write_csv(tmp_path / "fig2.csv", BAND_COLUMNS, rows)
    (tmp_path / "fig2_schedule.json").write_text(json.dumps({
        "schema_version": 1,
        "config": {"amplitude": 8e-3},
        "delta_tau_min": 10.0,
        "segments": [
            {"freeze_level": -1, "tau_start": 50.0, "tau_jump": 75.0},
            {"freeze_level": 1, "tau_start": 75.0, "tau_jump": None},
        ],
        "jump_windows": [[70.0, 80.0]],
    }))
    tau = rows[:, 0]
    star = np.zeros(len(tau))
    star[40] = 1.0
    write_csv(tmp_path / "fig3.csv", ("tau", "delta_H", "is_star"),
              np.column_stack([tau, 4e-3 * np.sin(tau), star]),
              {"dh_max": 4e-3})
    write_csv(tmp_path / "fig4.csv", ("tau", "H_theory"),
              np.column_stack([tau, rows[:, 1]]))
    (tmp_path / "fig4_markers.json").write_text(json.dumps({
        "schema_version": 1,
        "jump_tau": 25.0,
        "window_lo": 20.0,
        "window_hi": 30.0,
        "delta_tau_min": 10.0,
    }))
    write_csv(tmp_path / "fig4_overlay.csv",
              ("tau", "population", "time_us"),
              np.column_stack([tau[::10], (1 + rows[::10, 1]) / 2,
                               tau[::10] * 0.03]),
              {"T_Rabi_us": 50.0})
    return tmp_path
