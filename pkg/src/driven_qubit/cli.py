"""Command-line front end.

Subcommands:

    simulate   integrate one run and write trajectory + energy tables
    figure     emit the data files behind one of the four standard figures
    zeno       compute and write a freeze/jump schedule
    sweep      run several drive amplitudes and summarize the scalings
    check      execute the full invariant suite

Exit codes: 0 success, 1 check failure, 2 configuration error,
3 numerical failure.  A plain ``key = value`` config file can seed any
flag; explicit flags override the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .dynamics import (DEFAULT_TOLERANCES, PoleEscapeError, SamplingSpec,
                       StepBudgetError, integrate_hds)
from .energy import energy_sample_series
from .experiments import (envelope_report, heisenberg_jump_window,
                          ingest_experiment_overlay, run_weak_rabi,
                          sigma_band, zeno_jump_schedule)
from .model import DriveSpec, HdsState
from .serialize import (Table, energy_table, schedule_table, trajectory_table,
                        write_schedule_json, write_table)
from .suite import run_invariant_suite

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


class ConfigError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driven-qubit",
        description="Exact driven-qubit dynamics and energy-variance tools.")
    parser.add_argument("--config", help="key = value file seeding any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--amplitude", type=float, default=8e-3,
                       help="drive amplitude A (also the constant value)")
        p.add_argument("--drive", choices=("zero", "const", "sin"),
                       default="sin")
        p.add_argument("--tau-span", type=float, nargs=2, metavar=("T0", "T1"),
                       default=None)
        p.add_argument("--rtol", type=float, default=DEFAULT_TOLERANCES[0])
        p.add_argument("--atol", type=float, default=DEFAULT_TOLERANCES[1])
        p.add_argument("--samples-per-cycle", type=int, default=64)
        p.add_argument("--alpha0", type=float, default=0.0)
        p.add_argument("--delta0", type=float, default=0.0)
        p.add_argument("--theta0", type=float, default=0.0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=20240817)

    p_sim = sub.add_parser("simulate", help="integrate one run")
    common(p_sim)

    p_fig = sub.add_parser("figure", help="emit figure data files")
    p_fig.add_argument("fig_id", choices=("fig1", "fig2", "fig3", "fig4"))
    common(p_fig)
    p_fig.add_argument("--overlay", help="experimental overlay file (fig4)")
    p_fig.add_argument("--t-rabi-us", type=float, default=None,
                       help="physical Rabi period in microseconds (fig4)")

    p_zeno = sub.add_parser("zeno", help="freeze/jump schedule")
    common(p_zeno)
    p_zeno.add_argument("--start-level", type=int, choices=(-1, 1), default=1)
    p_zeno.add_argument("--tau-start", type=float, default=0.0)
    p_zeno.add_argument("--horizon", type=float, default=None,
                        help="default: two Rabi periods past tau-start")

    p_sweep = sub.add_parser("sweep", help="amplitude sweep summary")
    common(p_sweep)
    p_sweep.add_argument("--amplitudes", type=float, nargs="+",
                         default=[4e-3, 8e-3, 1.6e-2])
    p_sweep.add_argument("--workers", type=int, default=1)

    p_check = sub.add_parser("check", help="run the invariant suite")
    common(p_check)
    return parser


def _load_config_file(path: str) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse argv with file-sourced defaults; explicit flags win.

    Defaults set on the top-level parser land in the namespace before the
    subparser runs, so the subparser leaves them alone unless the flag
    was given on the command line.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        raw = _load_config_file(known.config)
        converted = {}
        for key, value in raw.items():
            if key in ("tau_span", "amplitudes"):
                converted[key] = [float(v) for v in value.replace(",", " ").split()]
            else:
                converted[key] = value
        parser.set_defaults(**converted)
    return parser.parse_args(argv)


def _number(args: argparse.Namespace, name: str, cast=float):
    """Fetch a flag value, casting strings that came from a config file."""
    value = getattr(args, name)
    if value is None:
        return None
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"--{name.replace('_', '-')}: not a number: {value!r}")


def _validate(args: argparse.Namespace) -> None:
    if _number(args, "amplitude") < 0:
        raise ConfigError(f"--amplitude must be >= 0, got {args.amplitude}")
    if not _number(args, "rtol") > 0:
        raise ConfigError(f"--rtol must be positive, got {args.rtol}")
    if not _number(args, "atol") > 0:
        raise ConfigError(f"--atol must be positive, got {args.atol}")
    if args.tau_span is not None:
        t0, t1 = (float(v) for v in args.tau_span)
        if t1 == t0:
            raise ConfigError("--tau-span must have nonzero length")
    a0 = _number(args, "alpha0")
    if abs(a0) > 1.0:
        raise ConfigError(f"--alpha0 must lie in [-1, 1], got {a0}")


def _drive_from(args: argparse.Namespace) -> DriveSpec:
    amplitude = float(args.amplitude)
    if args.drive == "zero":
        return DriveSpec.zero()
    if args.drive == "const":
        return DriveSpec.constant(amplitude)
    return DriveSpec.sinusoidal(amplitude)


def _run_config_dict(args: argparse.Namespace) -> dict:
    return {
        "amplitude": float(args.amplitude),
        "drive": args.drive,
        "rtol": float(args.rtol),
        "atol": float(args.atol),
        "samples_per_cycle": int(args.samples_per_cycle),
        "seed": int(args.seed),
    }


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args: argparse.Namespace) -> int:
    drive = _drive_from(args)
    if args.tau_span is not None:
        span = (float(args.tau_span[0]), float(args.tau_span[1]))
    elif drive.kind == "sinusoidal" and drive.value > 0:
        span = (0.0, 4.0 * math.pi / drive.value)
    else:
        span = (0.0, 100.0)
    start = HdsState(float(args.alpha0), float(args.delta0), float(args.theta0))
    traj = integrate_hds(
        start, drive, span,
        tolerances=(float(args.rtol), float(args.atol)),
        sampling=SamplingSpec(int(args.samples_per_cycle)),
    )
    out = _out_dir(args)
    write_table(trajectory_table(traj), out / f"trajectory.{args.format}",
                args.format)
    series = energy_sample_series(traj)
    write_table(energy_table(series, _run_config_dict(args)),
                out / f"energy.{args.format}", args.format)
    print(f"wrote {out / f'trajectory.{args.format}'} and "
          f"{out / f'energy.{args.format}'} ({len(traj)} samples)")
    return EXIT_OK


def _band_table(args: argparse.Namespace) -> tuple[Table, "object"]:
    run = run_weak_rabi(
        float(args.amplitude), 1.0,
        start=HdsState(float(args.alpha0), float(args.delta0), float(args.theta0)),
        tolerances=(float(args.rtol), float(args.atol)),
        sampling=SamplingSpec(int(args.samples_per_cycle)),
    )
    band = sigma_band(run)
    es = run.energy_series
    cols = ("tau", "H_mean", "H_env", "band_lower", "band_upper",
            "sigma_a_upper", "sigma_a_lower", "sigma_b_upper", "sigma_b_lower")
    rows = np.column_stack([
        band.taus, es.H_mean, band.h_env, band.lower, band.upper,
        es.H_mean + es.sigma_a, es.H_mean - es.sigma_a,
        es.H_mean + es.sigma_b, es.H_mean - es.sigma_b,
    ])
    return Table(cols, rows, _run_config_dict(args)), run


def _cmd_figure(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    amplitude = float(args.amplitude)
    fig = args.fig_id
    written: list[Path] = []

    if fig in ("fig1", "fig2"):
        table, run = _band_table(args)
        path = out / f"{fig}.{args.format}"
        write_table(table, path, args.format)
        written.append(path)
        if fig == "fig2":
            rep = envelope_report(run)
            sched = zeno_jump_schedule(
                amplitude, -1, run.rabi_period / 2.0, run.rabi_period,
                delta_h_max=rep.dh_max)
            spath = out / "fig2_schedule.json"
            write_schedule_json(sched, spath)
            written.append(spath)
    elif fig == "fig3":
        table, run = _band_table(args)
        rep = envelope_report(run)
        es = run.energy_series
        dh = es.alpha * es.drive_value
        star = np.zeros(len(es.tau))
        star[int(np.argmin(np.abs(es.tau - rep.dh_argmax_tau)))] = 1.0
        t3 = Table(("tau", "delta_H", "is_star"),
                   np.column_stack([es.tau, dh, star]),
                   {**_run_config_dict(args), "dh_max": rep.dh_max,
                    "dh_argmax_tau": rep.dh_argmax_tau})
        path = out / f"fig3.{args.format}"
        write_table(t3, path, args.format)
        written.append(path)
    else:  # fig4
        if amplitude <= 0:
            raise ConfigError("fig4 needs a positive --amplitude")
        rabi_period = 4.0 * math.pi / amplitude
        taus = np.linspace(0.0, rabi_period, 2001)
        t4 = Table(("tau", "H_theory"),
                   np.column_stack([taus, np.cos(amplitude * taus / 2.0)]),
                   _run_config_dict(args))
        path = out / f"fig4.{args.format}"
        write_table(t4, path, args.format)
        written.append(path)

        sched = zeno_jump_schedule(amplitude, +1, 0.0, rabi_period)
        jump = sched.jump_taus[0]
        lo, hi = sched.jump_windows[0]
        markers = {
            "schema_version": 1,
            "jump_tau": jump,
            "window_lo": lo,
            "window_hi": hi,
            "delta_tau_min": sched.delta_tau_min,
        }
        if args.overlay:
            t_rabi = _number(args, "t_rabi_us")
            overlay = ingest_experiment_overlay(args.overlay, t_rabi, amplitude)
            opath = out / "fig4_overlay.csv"
            write_table(Table(("tau", "population", "time_us"),
                              np.column_stack([overlay.taus,
                                               overlay.populations,
                                               overlay.times_us]),
                              {"T_Rabi_us": overlay.t_rabi_us}), opath)
            written.append(opath)
            markers["delta_t_us"] = overlay.delta_t_us(sched.delta_tau_min)
            markers["T_Rabi_us"] = overlay.t_rabi_us
        mpath = out / "fig4_markers.json"
        mpath.write_text(json.dumps(markers, indent=1) + "\n")
        written.append(mpath)

    print("wrote " + ", ".join(str(p) for p in written))
    return EXIT_OK


def _cmd_zeno(args: argparse.Namespace) -> int:
    amplitude = float(args.amplitude)
    if amplitude > 0:
        rabi_period = 4.0 * math.pi / amplitude
        horizon = args.horizon if args.horizon is not None \
            else float(args.tau_start) + 2.0 * rabi_period
    else:
        horizon = args.horizon if args.horizon is not None else 1000.0
    sched = zeno_jump_schedule(amplitude, int(args.start_level),
                               float(args.tau_start), float(horizon))
    out = _out_dir(args)
    jpath = out / "zeno_schedule.json"
    write_schedule_json(sched, jpath)
    cpath = out / f"zeno_schedule.{args.format}"
    write_table(schedule_table(sched), cpath, args.format)
    njump = len(sched.jump_taus)
    print(f"wrote {jpath} and {cpath} "
          f"({njump} jumps, delta_tau_min = {sched.delta_tau_min:g})")
    return EXIT_OK


def _sweep_one(job: tuple) -> tuple:
    amplitude, rtol, atol, spc = job
    run = run_weak_rabi(amplitude, 1.0, tolerances=(rtol, atol),
                        sampling=SamplingSpec(spc))
    rep = envelope_report(run)
    sched = zeno_jump_schedule(amplitude, +1, 0.0, run.rabi_period,
                               delta_h_max=rep.dh_max)
    first_jump = sched.jump_taus[0] if sched.jump_taus else math.nan
    return (amplitude, run.rabi_period, rep.dh_max,
            heisenberg_jump_window(amplitude, rep.dh_max),
            first_jump, rep.exceedance_fraction)


def _cmd_sweep(args: argparse.Namespace) -> int:
    for amplitude in args.amplitudes:
        if amplitude <= 0:
            raise ConfigError(f"sweep amplitudes must be positive, got {amplitude}")
    jobs = [(float(a), float(args.rtol), float(args.atol),
             int(args.samples_per_cycle)) for a in args.amplitudes]
    if int(args.workers) > 1:
        with ProcessPoolExecutor(max_workers=int(args.workers)) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(job) for job in jobs]
    cols = ("amplitude", "rabi_period", "dh_max", "delta_tau_min",
            "first_jump_tau", "exceedance_fraction")
    table = Table(cols, np.array(results), _run_config_dict(args))
    out = _out_dir(args)
    path = out / f"sweep.{args.format}"
    write_table(table, path, args.format)
    print(f"wrote {path} ({len(results)} amplitudes)")
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    report = run_invariant_suite(
        tolerances=(float(args.rtol), float(args.atol)),
        seed=int(args.seed))
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name:28s} measured {c.measured:.3g} "
              f"(threshold {c.threshold:.3g}, {c.runtime:.2f} s)")
    print(f"{'all passed' if report.all_passed else 'FAILURES'} "
          f"in {report.total_runtime:.1f} s")
    out = _out_dir(args)
    (out / "suite_report.json").write_text(
        json.dumps(report.as_dict(include_runtime=False), indent=1) + "\n")
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILURE


_COMMANDS = {
    "simulate": _cmd_simulate,
    "figure": _cmd_figure,
    "zeno": _cmd_zeno,
    "sweep": _cmd_sweep,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = _apply_config_file(parser, list(sys.argv[1:] if argv is None
                                               else argv))
        _validate(args)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (PoleEscapeError, StepBudgetError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
