import json
import math

import numpy as np
import pytest

from driven_qubit import (DriveSpec, HdsState, Table, energy_sample_series,
                          energy_table, integrate_hds, read_schedule_json,
                          read_table, run_invariant_suite, schedule_table,
                          trajectory_table, write_schedule_json, write_table,
                          zeno_jump_schedule)
from driven_qubit.cli import (EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_OK,
                              main)


@pytest.fixture(scope="module")
def small_traj():
    return integrate_hds(HdsState(0.2, 0.3, 0.0), DriveSpec.constant(0.5),
                         (0.0, 10.0))


class TestTables:
    def test_csv_roundtrip_is_exact(self, small_traj, tmp_path):
        table = trajectory_table(small_traj)
        path = tmp_path / "traj.csv"
        write_table(table, path, "csv")
        back = read_table(path)
        assert back.columns == table.columns
        assert np.array_equal(back.rows, table.rows)
        assert back.config["drive_kind"] == "constant"

    def test_json_roundtrip_is_exact(self, small_traj, tmp_path):
        table = energy_table(energy_sample_series(small_traj), {"seed": 7})
        path = tmp_path / "energy.json"
        write_table(table, path, "json")
        back = read_table(path)
        assert back.columns == table.columns
        assert np.array_equal(back.rows, table.rows)
        assert back.config == {"seed": 7}

    def test_empty_series_header_only(self, tmp_path):
        table = Table(("tau", "x"), np.empty((0, 2)))
        path = tmp_path / "empty.csv"
        write_table(table, path, "csv")
        lines = [l for l in path.read_text().splitlines() if l]
        assert lines == ["tau,x"]
        assert len(read_table(path).rows) == 0

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# only a comment\n")
        with pytest.raises(ValueError):
            read_table(path)

    def test_unknown_format_rejected(self, small_traj, tmp_path):
        with pytest.raises(ValueError):
            write_table(trajectory_table(small_traj), tmp_path / "x", "xml")


class TestScheduleSerialization:
    def test_default_window_value(self, tmp_path):
        sched = zeno_jump_schedule(8e-3, +1, 0.0, 4 * math.pi / 8e-3)
        path = tmp_path / "sched.json"
        write_schedule_json(sched, path)
        payload = json.loads(path.read_text())
        assert payload["delta_tau_min"] == pytest.approx(250.0)
        back = read_schedule_json(path)
        assert back.jump_taus == sched.jump_taus
        assert back.delta_tau_min == sched.delta_tau_min

    def test_segment_table(self):
        sched = zeno_jump_schedule(8e-3, +1, 0.0, 4 * math.pi / 8e-3)
        table = schedule_table(sched)
        assert table.column("freeze_level")[0] == 1.0
        assert math.isnan(table.column("tau_jump")[-1])


class TestCli:
    def test_simulate_writes_tables(self, tmp_path):
        code = main(["simulate", "--drive", "const", "--amplitude", "0.5",
                     "--tau-span", "0", "20", "--out", str(tmp_path)])
        assert code == EXIT_OK
        table = read_table(tmp_path / "trajectory.csv")
        assert "alpha" in table.columns
        assert len(table.rows) > 100

    def test_figure_fig1_zero_drive_band(self, tmp_path):
        code = main(["figure", "fig1", "--drive", "zero", "--amplitude", "0",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        table = read_table(tmp_path / "fig1.csv")
        width = table.column("band_upper") - table.column("band_lower")
        assert np.max(width) < 1e-9

    def test_zeno_outputs(self, tmp_path):
        code = main(["zeno", "--out", str(tmp_path)])
        assert code == EXIT_OK
        payload = json.loads((tmp_path / "zeno_schedule.json").read_text())
        assert payload["delta_tau_min"] == pytest.approx(250.0)

    def test_determinism(self, tmp_path):
        for sub in ("a", "b"):
            code = main(["zeno", "--seed", "7", "--out", str(tmp_path / sub)])
            assert code == EXIT_OK
        first = (tmp_path / "a" / "zeno_schedule.json").read_bytes()
        second = (tmp_path / "b" / "zeno_schedule.json").read_bytes()
        assert first == second

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("drive = const\namplitude = 0.5\ntau_span = 0 20\n")
        code = main(["--config", str(cfg), "simulate", "--amplitude", "0.25",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        table = read_table(tmp_path / "trajectory.csv")
        assert table.config["drive_value"] == pytest.approx(0.25)

    def test_negative_amplitude_rejected(self, tmp_path, capsys):
        code = main(["simulate", "--amplitude", "-1", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG_ERROR
        assert "amplitude" in capsys.readouterr().err

    def test_zero_length_span_rejected(self, tmp_path):
        code = main(["simulate", "--tau-span", "5", "5", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG_ERROR

    def test_alpha_out_of_range_rejected(self, tmp_path):
        code = main(["simulate", "--alpha0", "1.5", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG_ERROR

    def test_nonpositive_tolerance_rejected(self, tmp_path):
        code = main(["simulate", "--rtol", "0", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG_ERROR

    def test_fig4_with_overlay(self, tmp_path):
        overlay = tmp_path / "points.csv"
        overlay.write_text("time_us,population\n0,1.0\n25,0.5\n50,0.0\n")
        code = main(["figure", "fig4", "--overlay", str(overlay),
                     "--t-rabi-us", "50", "--out", str(tmp_path)])
        assert code == EXIT_OK
        markers = json.loads((tmp_path / "fig4_markers.json").read_text())
        assert markers["delta_tau_min"] == pytest.approx(250.0)
        assert markers["delta_t_us"] == pytest.approx(7.96, abs=0.01)
        back = read_table(tmp_path / "fig4_overlay.csv")
        assert back.column("tau")[-1] == pytest.approx(4 * math.pi / 8e-3)


class TestSuiteSmoke:
    def test_corrupted_tolerances_fail_oracle_checks(self):
        report = run_invariant_suite(tolerances=(1e-2, 1e-4),
                                     n_oracle_states=2)
        assert not report.all_passed
        by_name = {c.name: c for c in report.checks}
        assert not by_name["oracle-equivalence"].passed

    def test_pinned_seed_reports_are_identical(self):
        a = run_invariant_suite(seed=3, n_oracle_states=2)
        b = run_invariant_suite(seed=3, n_oracle_states=2)
        assert json.dumps(a.as_dict(include_runtime=False)) == \
            json.dumps(b.as_dict(include_runtime=False))
