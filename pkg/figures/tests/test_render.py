import math
import shutil
import subprocess

import numpy as np
import pytest

from qubit_figures import DataError, FigureManifest, read_table, render
from qubit_figures.data import read_schedule
from qubit_figures.render import main

from figtools import write_csv


class TestRender:
    @pytest.mark.parametrize("fig_id", ["fig1", "fig2", "fig3", "fig4"])
    def test_all_figures(self, synthetic_dir, tmp_path, fig_id):
        out = tmp_path / f"{fig_id}.png"
        path = render(fig_id, FigureManifest(fig_id, synthetic_dir, out))
        assert path == out
        assert out.exists() and out.stat().st_size > 1000

    def test_fig4_without_overlay(self, synthetic_dir, tmp_path):
        (synthetic_dir / "fig4_overlay.csv").unlink()
        out = tmp_path / "fig4.png"
        render("fig4", FigureManifest("fig4", synthetic_dir, out))
        assert out.exists()

    def test_mismatched_manifest(self, synthetic_dir, tmp_path):
        manifest = FigureManifest("fig1", synthetic_dir, tmp_path / "x.png")
        with pytest.raises(DataError, match="manifest"):
            render("fig3", manifest)

    def test_unknown_fig_id(self, synthetic_dir, tmp_path):
        with pytest.raises(DataError, match="unknown figure id"):
            FigureManifest("fig9", synthetic_dir, tmp_path / "x.png")

    def test_missing_data_file(self, tmp_path):
        manifest = FigureManifest("fig1", tmp_path, tmp_path / "x.png")
        with pytest.raises(DataError, match="no fig1"):
            render("fig1", manifest)

    def test_missing_columns(self, tmp_path):
        write_csv(tmp_path / "fig1.csv", ("tau", "H_mean"), [[0.0, 1.0]])
        manifest = FigureManifest("fig1", tmp_path, tmp_path / "x.png")
        with pytest.raises(DataError, match="missing columns"):
            render("fig1", manifest)


class TestMain:
    def test_success(self, synthetic_dir, tmp_path, capsys):
        out = tmp_path / "fig1.png"
        assert main(["--fig", "fig1", "--data", str(synthetic_dir),
                     "--out", str(out)]) == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_header_only_csv_nonzero_exit(self, tmp_path, capsys):
        (tmp_path / "fig3.csv").write_text("tau,delta_H,is_star\n")
        code = main(["--fig", "fig3", "--data", str(tmp_path),
                     "--out", str(tmp_path / "x.png")])
        assert code != 0
        assert "data error" in capsys.readouterr().err

    def test_missing_data_nonzero_exit(self, tmp_path):
        assert main(["--fig", "fig2", "--data", str(tmp_path),
                     "--out", str(tmp_path / "x.png")]) != 0


needs_cli = pytest.mark.skipif(shutil.which("driven-qubit") is None,
                               reason="driven-qubit CLI not installed")


@pytest.fixture(scope="session")
def emitted_dir(tmp_path_factory):
    """Fresh data for all four figures from the simulation CLI."""
    root = tmp_path_factory.mktemp("emitted")
    for fig in ("fig1", "fig2", "fig3", "fig4"):
        subprocess.run(["driven-qubit", "figure", fig, "--out", str(root)],
                       check=True, capture_output=True, timeout=300)
    return root


@needs_cli
class TestRegeneration:
    """Structural acceptance on freshly emitted data."""

    def test_all_four_render(self, emitted_dir, tmp_path):
        for fig in ("fig1", "fig2", "fig3", "fig4"):
            out = tmp_path / f"{fig}.png"
            assert main(["--fig", fig, "--data", str(emitted_dir),
                         "--out", str(out)]) == 0
            assert out.exists()

    def test_fig1_band_pinches_twice(self, emitted_dir):
        table = read_table(emitted_dir / "fig1.csv")
        width = table.column("band_upper") - table.column("band_lower")
        tau = table.column("tau")
        period = tau[-1] - tau[0]
        # pinch points sit at the eigenvalue touchpoints tau = 0 and T/2
        for frac in (0.0, 0.5):
            near = np.abs(tau - tau[0] - frac * period) < 0.02 * period
            assert width[near].min() < 0.15
        quarter = np.abs(tau - tau[0] - 0.25 * period) < 0.02 * period
        assert width[quarter].max() > 1.5

    def test_fig2_one_upward_jump_per_half_period(self, emitted_dir):
        sched = read_schedule(emitted_dir / "fig2_schedule.json")
        amplitude = sched["config"]["amplitude"]
        half_period = 2.0 * math.pi / amplitude
        start = sched["segments"][0]["tau_start"]
        jumps = [s for s in sched["segments"] if s["tau_jump"] is not None]
        upward = [s for s in jumps if s["freeze_level"] == -1]
        # the emitted schedule covers one half Rabi period from tau = T/2
        assert len(upward) == 1
        assert start < upward[0]["tau_jump"] <= start + half_period
