"""Render the four standard figures from emitted data files.

Each figure is a pure function of the CSV/JSON files produced by the
simulation CLI; nothing is recomputed here.  Usage:

    qubit-figures --fig fig1 --data runs/fig1 --out fig1.png
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .data import DataError, Table, read_markers, read_schedule, read_table

FIG_IDS = ("fig1", "fig2", "fig3", "fig4")

BAND_COLOR = "#ffd27f"
STATE_A_COLOR = "tab:red"
STATE_B_COLOR = "tab:blue"


@dataclass(frozen=True)
class FigureManifest:
    """Where a figure's data lives and where the image goes."""

    fig_id: str
    data_dir: Path
    out_path: Path
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        if self.fig_id not in FIG_IDS:
            raise DataError(f"unknown figure id {self.fig_id!r}; "
                            f"expected one of {FIG_IDS}")
        object.__setattr__(self, "data_dir", Path(self.data_dir))
        object.__setattr__(self, "out_path", Path(self.out_path))


def _find_table(data_dir: Path, stem: str) -> Table:
    for suffix in (".csv", ".json"):
        candidate = data_dir / (stem + suffix)
        if candidate.exists():
            return read_table(candidate)
    raise DataError(f"no {stem}.csv or {stem}.json under {data_dir}")


def _new_axes(manifest: FigureManifest, ylabel: str):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(ylabel)
    if manifest.xlim is not None:
        ax.set_xlim(*manifest.xlim)
    if manifest.ylim is not None:
        ax.set_ylim(*manifest.ylim)
    if manifest.title is not None:
        ax.set_title(manifest.title)
    return fig, ax


def _draw_band(ax, table: Table) -> None:
    table.require("tau", "H_mean", "H_env", "band_lower", "band_upper",
                  "sigma_a_upper", "sigma_a_lower",
                  "sigma_b_upper", "sigma_b_lower")
    tau = table.column("tau")
    ax.fill_between(tau, table.column("band_lower"),
                    table.column("band_upper"),
                    color=BAND_COLOR, lw=0, label=r"$\pm\sigma_Q$ band")
    ax.plot(tau, table.column("sigma_a_upper"), color=STATE_A_COLOR, lw=0.8)
    ax.plot(tau, table.column("sigma_a_lower"), color=STATE_A_COLOR, lw=0.8,
            label=r"$\pm\sigma_a$")
    ax.plot(tau, table.column("sigma_b_upper"), color=STATE_B_COLOR, lw=0.8)
    ax.plot(tau, table.column("sigma_b_lower"), color=STATE_B_COLOR, lw=0.8,
            label=r"$\pm\sigma_b$")
    ax.plot(tau, table.column("H_env"), color="black", lw=2.5,
            label=r"$\mathcal{H}$ (smoothed)")


def _render_fig1(manifest: FigureManifest) -> None:
    table = _find_table(manifest.data_dir, "fig1")
    fig, ax = _new_axes(manifest, "energy")
    _draw_band(ax, table)
    ax.legend(loc="lower left", fontsize=8)
    _save(fig, manifest)


def _render_fig2(manifest: FigureManifest) -> None:
    table = _find_table(manifest.data_dir, "fig2")
    schedule = read_schedule(manifest.data_dir / "fig2_schedule.json")
    fig, ax = _new_axes(manifest, "energy")
    _draw_band(ax, table)
    tau_max = float(table.column("tau")[-1])
    for seg in schedule["segments"]:
        level = float(seg["freeze_level"])
        start = float(seg["tau_start"])
        jump = seg["tau_jump"]
        end = tau_max if jump is None else float(jump)
        ax.hlines(level, start, end, color="black", lw=1.8, ls="--")
        if jump is not None:
            ax.annotate("", xy=(end, -level), xytext=(end, level),
                        arrowprops=dict(arrowstyle="->", color="black",
                                        lw=1.5))
    for lo, hi in schedule["jump_windows"]:
        ax.axvspan(float(lo), float(hi), color="0.85", zorder=0)
    ax.legend(loc="lower left", fontsize=8)
    _save(fig, manifest)


def _render_fig3(manifest: FigureManifest) -> None:
    table = _find_table(manifest.data_dir, "fig3")
    table.require("tau", "delta_H", "is_star")
    tau = table.column("tau")
    dh = table.column("delta_H")
    star = table.column("is_star") > 0.5
    fig, ax = _new_axes(manifest, r"$\Delta\mathcal{H}$")
    ax.plot(tau, dh, color="tab:purple", lw=0.4)
    if star.any():
        ax.plot(tau[star], dh[star], marker="*", ms=14, ls="none",
                color="black", label=r"$\Delta H_{max}$")
        ax.legend(loc="upper right", fontsize=8)
    ax.axhline(0.0, color="0.6", lw=0.6)
    _save(fig, manifest)


def _render_fig4(manifest: FigureManifest) -> None:
    table = _find_table(manifest.data_dir, "fig4")
    table.require("tau", "H_theory")
    markers = read_markers(manifest.data_dir / "fig4_markers.json")
    fig, ax = _new_axes(manifest, r"$\mathcal{H}$, population")
    ax.plot(table.column("tau"), table.column("H_theory"),
            color="black", lw=1.5, label=r"$\cos(A\tau/2)$")
    overlay_path = manifest.data_dir / "fig4_overlay.csv"
    if overlay_path.exists():
        overlay = read_table(overlay_path)
        overlay.require("tau", "population")
        ax.plot(overlay.column("tau"), overlay.column("population"),
                marker="o", ms=3, ls="none", color="tab:green",
                label="experiment")
    for x in (float(markers["window_lo"]), float(markers["window_hi"])):
        ax.axvline(x, color=STATE_A_COLOR, lw=1.8)
    ax.axvline(float(markers["jump_tau"]), color="0.5", lw=0.8, ls=":")
    ax.legend(loc="lower left", fontsize=8)
    _save(fig, manifest)


_RENDERERS = {
    "fig1": _render_fig1,
    "fig2": _render_fig2,
    "fig3": _render_fig3,
    "fig4": _render_fig4,
}


def _save(fig, manifest: FigureManifest) -> None:
    manifest.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(manifest.out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render(fig_id: str, manifest: FigureManifest) -> Path:
    """Render one figure and return the written image path."""
    if fig_id != manifest.fig_id:
        raise DataError(f"manifest is for {manifest.fig_id!r}, "
                        f"asked to render {fig_id!r}")
    _RENDERERS[fig_id](manifest)
    return manifest.out_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qubit-figures",
        description="Render standard figures from emitted data files.")
    parser.add_argument("--fig", required=True, choices=FIG_IDS)
    parser.add_argument("--data", required=True,
                        help="directory holding the emitted data files")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    manifest = FigureManifest(args.fig, Path(args.data), Path(args.out),
                              title=args.title)
    try:
        path = render(args.fig, manifest)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
