"""Weak-Rabi-drive experiments: sigma bands, envelopes, and Zeno jump schedules.

A weak resonant drive ``E(tau) = A sin(tau)`` with ``A << 1`` produces
the quasi-harmonic mean-energy oscillation ``H ~ cos(A tau / 2)`` with
Rabi period ``4 pi / A``, dressed by the residual ``dH = alpha E(tau)``.
The statistically accessible energy band about the mean has half-width
``sigma = sqrt(E^2 - H^2 + 1)``.

Under a continuously repeated measurement the mean energy is frozen at
an eigenvalue instead of following the Rabi oscillation; the freeze can
persist only while the frozen level lies inside the sigma band.  The
moment the band no longer contains it, the level jumps to the opposite
eigenvalue: an abrupt, step-like transition whose minimum duration
follows from the uncertainty product ``dH_max * dtau >= 1`` (reduced
units), giving ``dtau_min = 1 / dH_max ~ 250`` at A = 8e-3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import SamplingSpec, Trajectory, integrate_hds, DEFAULT_TOLERANCES
from .energy import EnergySeries, energy_sample_series
from .model import DriveSpec, HdsState

__all__ = [
    "RabiRun",
    "SigmaBand",
    "EnvelopeReport",
    "ZenoSegment",
    "ZenoSchedule",
    "ExperimentOverlay",
    "OverlayFormatError",
    "run_weak_rabi",
    "sigma_band",
    "envelope_report",
    "zeno_jump_schedule",
    "heisenberg_jump_window",
    "ingest_experiment_overlay",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RabiRun:
    """One weak-drive simulation with its derived energy observables."""

    amplitude: float
    rabi_period: float
    trajectory: Trajectory
    energy_series: EnergySeries


def run_weak_rabi(amplitude: float, n_periods: float = 1.0,
                  start: HdsState = HdsState(0.0, 0.0, 0.0),
                  tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
                  sampling: SamplingSpec | None = None) -> RabiRun:
    """Simulate a resonant drive ``A sin(tau)`` over ``n_periods`` Rabi periods.

    ``amplitude = 0`` degenerates to a conservative run over one fast
    period worth 4*pi of reduced time per "period" requested.
    """
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    if amplitude > 0.05:
        warnings.warn(f"amplitude {amplitude} is outside the weak-drive regime",
                      stacklevel=2)
    if amplitude > 0:
        drive = DriveSpec.sinusoidal(amplitude)
        rabi_period = 4.0 * math.pi / amplitude
    else:
        drive = DriveSpec.zero()
        rabi_period = math.inf
    span = (0.0, n_periods * (4.0 * math.pi if amplitude == 0 else rabi_period))
    traj = integrate_hds(start, drive, span, tolerances=tolerances, sampling=sampling)
    return RabiRun(
        amplitude=amplitude,
        rabi_period=rabi_period,
        trajectory=traj,
        energy_series=energy_sample_series(traj),
    )


@dataclass(frozen=True)
class SigmaBand:
    """Statistically accessible energy band about the (smoothed) mean energy."""

    taus: np.ndarray
    h_env: np.ndarray
    sigma: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def _sliding_mean(taus: np.ndarray, values: np.ndarray, window: float) -> np.ndarray:
    if len(taus) < 2:
        return values.copy()
    dt = taus[1] - taus[0]
    n = max(1, int(round(window / dt)))
    kernel = np.ones(n)
    # normalize by the actual sample count so the edges are unbiased
    sums = np.convolve(values, kernel, mode="same")
    counts = np.convolve(np.ones_like(values), kernel, mode="same")
    return sums / counts


def sigma_band(run: RabiRun, smoothing_window: float = TWO_PI) -> SigmaBand:
    """Band (H_env - sigma, H_env + sigma) from the smoothed mean energy.

    The half-width is sqrt(E^2 - H_env^2 + 1); for a small drive this is
    ~ sqrt(1 - H_env^2), pinching to zero at the eigenvalues +-1.
    """
    es = run.energy_series
    h_env = _sliding_mean(run.trajectory.taus, es.H_mean, smoothing_window)
    sig = np.sqrt(np.maximum(es.drive_value**2 - h_env**2 + 1.0, 0.0))
    return SigmaBand(taus=run.trajectory.taus.copy(), h_env=h_env, sigma=sig,
                     lower=h_env - sig, upper=h_env + sig)


@dataclass(frozen=True)
class EnvelopeReport:
    """Windowed envelope statistics of one weak-drive run.

    ``dh_max`` is the global maximum of |alpha * E(tau)| over the half
    Rabi period starting at tau = 2*pi/A (the re-originated gap-crossing
    stretch); ``exceedance_fraction`` counts windows whose state-energy
    maxima exceed (1 + tol) times the window quantum-sigma maximum.
    """

    window: float
    tol: float
    window_starts: np.ndarray
    max_sigma_a: np.ndarray
    max_sigma_b: np.ndarray
    max_abs_dh: np.ndarray
    max_sigma_q: np.ndarray
    exceedance_fraction: float
    dh_max: float
    dh_argmax_tau: float


def envelope_report(run: RabiRun, window: float = TWO_PI,
                    tol: float = 0.05) -> EnvelopeReport:
    """Windowed maxima of the state-energy deviations and the drive residual."""
    taus = run.trajectory.taus
    if len(taus) < 2 or taus[-1] - taus[0] < window:
        raise ValueError("window is longer than the run")
    es = run.energy_series
    dh = np.abs(es.alpha * es.drive_value)

    dt = taus[1] - taus[0]
    per = max(1, int(round(window / dt)))
    nwin = len(taus) // per
    starts = taus[: nwin * per : per]
    max_sa = np.empty(nwin)
    max_sb = np.empty(nwin)
    max_dh = np.empty(nwin)
    max_sq = np.empty(nwin)
    exceed = 0
    for i in range(nwin):
        sl = slice(i * per, (i + 1) * per)
        max_sa[i] = es.sigma_a[sl].max()
        max_sb[i] = es.sigma_b[sl].max()
        max_dh[i] = dh[sl].max()
        max_sq[i] = es.sigma_q[sl].max()
        if max(max_sa[i], max_sb[i]) > (1.0 + tol) * max_sq[i]:
            exceed += 1

    # global residual maximum over the gap-crossing half Rabi period
    if math.isfinite(run.rabi_period):
        lo = run.rabi_period / 2.0
        hi = run.rabi_period
        mask = (taus >= lo) & (taus <= hi)
        if not mask.any():
            mask = np.ones_like(taus, dtype=bool)
    else:
        mask = np.ones_like(taus, dtype=bool)
    sub = np.where(mask)[0]
    k = sub[np.argmax(dh[sub])]
    return EnvelopeReport(
        window=window, tol=tol, window_starts=starts,
        max_sigma_a=max_sa, max_sigma_b=max_sb,
        max_abs_dh=max_dh, max_sigma_q=max_sq,
        exceedance_fraction=exceed / nwin if nwin else 0.0,
        dh_max=float(dh[k]),
        dh_argmax_tau=float(taus[k]),
    )


@dataclass(frozen=True)
class ZenoSegment:
    """One freeze stretch: the level held and when it ends (None = horizon)."""

    freeze_level: int
    tau_start: float
    tau_jump: float | None


@dataclass(frozen=True)
class ZenoSchedule:
    """Alternating freeze segments with jump times and uncertainty windows."""

    amplitude: float
    segments: list[ZenoSegment]
    jump_windows: list[tuple[float, float]]
    delta_tau_min: float

    @property
    def jump_taus(self) -> list[float]:
        return [s.tau_jump for s in self.segments if s.tau_jump is not None]


def _band_contains(level: float, x: float) -> bool:
    # analytic weak-drive band: H = cos(x), sigma = |sin(x)| with x = A*tau/2
    return abs(level - math.cos(x)) <= abs(math.sin(x))


def zeno_jump_schedule(amplitude: float, start_level: int, tau_start: float,
                       horizon: float, delta_h_max: float | None = None,
                       bisect_tol: float = 1e-6) -> ZenoSchedule:
    """Freeze/jump schedule of a repeatedly measured, weakly driven qubit.

    From ``tau_start`` the frozen level stays put while the analytic
    sigma band contains it; the first time the band strictly excludes
    the level (located by bisection to ``bisect_tol``) the level flips
    sign and a new segment begins.  Each jump carries the uncertainty
    window ``tau_jump +- delta_tau_min/2``.  A level sitting exactly on
    the band edge does not jump (strict exit required).
    """
    if start_level not in (-1, 1):
        raise ValueError("start_level must be +1 or -1")
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")

    if amplitude == 0.0:
        return ZenoSchedule(
            amplitude=0.0,
            segments=[ZenoSegment(start_level, tau_start, None)],
            jump_windows=[],
            delta_tau_min=math.inf,
        )

    dtau_min = heisenberg_jump_window(amplitude, delta_h_max)
    march = math.pi / (16.0 * amplitude)  # safely below the pi/A gap between exits
    level = start_level
    tau = tau_start
    segments: list[ZenoSegment] = []
    windows: list[tuple[float, float]] = []
    while tau < horizon:
        seg_start = tau
        lo = tau
        hi = None
        t = tau
        while t < horizon:
            t_next = min(t + march, horizon)
            if not _band_contains(level, amplitude * t_next / 2.0):
                hi = t_next
                break
            lo = t_next
            t = t_next
        if hi is None:
            segments.append(ZenoSegment(level, seg_start, None))
            break
        while hi - lo > bisect_tol:
            mid = 0.5 * (lo + hi)
            if _band_contains(level, amplitude * mid / 2.0):
                lo = mid
            else:
                hi = mid
        tau_jump = 0.5 * (lo + hi)
        segments.append(ZenoSegment(level, seg_start, tau_jump))
        windows.append((tau_jump - dtau_min / 2.0, tau_jump + dtau_min / 2.0))
        level = -level
        tau = tau_jump
    return ZenoSchedule(amplitude=amplitude, segments=segments,
                        jump_windows=windows, delta_tau_min=dtau_min)


def heisenberg_jump_window(amplitude: float,
                           measured_dh_max: float | None = None) -> float:
    """Minimum jump duration 1 / dH_max from the uncertainty product.

    Falls back to dH_max = A/2 when no measured value is supplied.
    """
    dh = measured_dh_max if measured_dh_max is not None else amplitude / 2.0
    if not dh > 0:
        raise ValueError(f"dH_max must be positive, got {dh!r}")
    return 1.0 / dh


class OverlayFormatError(ValueError):
    """An experimental overlay file could not be parsed."""


@dataclass(frozen=True)
class ExperimentOverlay:
    """Measured (time, excited population) points mapped onto the reduced clock."""

    times_us: np.ndarray
    populations: np.ndarray
    t_rabi_us: float
    amplitude: float
    taus: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        scale = (4.0 * math.pi / self.amplitude) / self.t_rabi_us
        object.__setattr__(self, "taus", self.times_us * scale)

    def delta_t_us(self, delta_tau: float) -> float:
        """Convert a reduced time interval to physical microseconds."""
        return delta_tau * self.t_rabi_us / (4.0 * math.pi / self.amplitude)


def ingest_experiment_overlay(path: str | Path, t_rabi_us: float | None,
                              amplitude: float) -> ExperimentOverlay:
    """Load delimited ``time_us,population`` rows (header and # comments allowed).

    A metadata row ``T_Rabi_us=<value>`` supplies the Rabi period unless
    ``t_rabi_us`` is given explicitly (the explicit value wins).
    """
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    times: list[float] = []
    pops: list[float] = []
    file_t_rabi: float | None = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and line.split("=")[0].strip().lower() == "t_rabi_us":
            try:
                file_t_rabi = float(line.split("=", 1)[1])
            except ValueError as exc:
                raise OverlayFormatError(f"line {lineno}: bad T_Rabi_us value") from exc
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise OverlayFormatError(f"line {lineno}: expected two columns, got {raw!r}")
        try:
            t, p = float(parts[0]), float(parts[1])
        except ValueError:
            if lineno == 1 or (not times and not pops):
                continue  # header row
            raise OverlayFormatError(f"line {lineno}: non-numeric row {raw!r}")
        times.append(t)
        pops.append(p)
    t_rabi = t_rabi_us if t_rabi_us is not None else file_t_rabi
    if t_rabi is None or t_rabi <= 0:
        raise OverlayFormatError("no positive T_Rabi_us given (flag or metadata row)")
    return ExperimentOverlay(
        times_us=np.asarray(times), populations=np.asarray(pops),
        t_rabi_us=float(t_rabi), amplitude=float(amplitude),
    )
