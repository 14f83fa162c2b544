"""Classical-like Hamiltonian dynamics of the driven qubit.

Equations of motion for the canonical pair ``(alpha, delta)``,

    d alpha / d tau = sqrt(1 - alpha^2) sin(delta)
    d delta / d tau = -alpha cos(delta) / sqrt(1 - alpha^2) + E(tau)

with conserved value ``H = sqrt(1 - alpha^2) cos(delta) + alpha E`` for a
constant drive, plus the slaved overall phase

    d Theta / d tau = -1/2 [ sqrt((1-alpha)/(1+alpha)) cos(delta) + E(tau) ]

integrated as a third component in the same pass for consistent error
control.  All orbits of the constant-drive system share the angular
frequency sqrt(1 + E^2), with circulation sense tied to the sign of H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import integrator
from .model import DriveSpec, HdsState, ModelParams, drive_eval

__all__ = [
    "HdsDerivative",
    "SamplingSpec",
    "IntegrationStats",
    "Trajectory",
    "PeriodMeasurement",
    "PoleProximityError",
    "PoleEscapeError",
    "StepBudgetError",
    "NoOscillationError",
    "DEFAULT_TOLERANCES",
    "hamiltonian_value",
    "hds_rhs",
    "sample_grid",
    "integrate_hds",
    "measure_period",
    "theta_advance_check",
]

#: (rtol, atol) defaults; chosen so the fast-cycle phase stays accurate
#: over a full Rabi period of ~1571 reduced time units
DEFAULT_TOLERANCES = (1e-10, 1e-12)

_POLE_MARGIN = 1e-12


class PoleProximityError(ValueError):
    """The canonical chart is evaluated too close to |alpha| = 1."""


class StepBudgetError(RuntimeError):
    """The integrator exceeded its step budget."""


class PoleEscapeError(RuntimeError):
    """Integration was driven onto a pole |alpha| -> 1 and aborted.

    The partially integrated trajectory is attached as ``.partial``.
    """

    def __init__(self, message: str, partial: "Trajectory"):
        super().__init__(message)
        self.partial = partial


class NoOscillationError(ValueError):
    """Period measurement found fewer than two oscillations."""


@dataclass(frozen=True)
class HdsDerivative:
    """Time derivatives of (alpha, delta, Theta) at one point."""

    d_alpha: float
    d_delta: float
    d_theta: float


@dataclass(frozen=True)
class SamplingSpec:
    """Output sampling density for trajectories.

    The stride is ``2*pi / (samples_per_cycle * sqrt(1 + Emax^2))`` so a
    fast orbit cycle is always covered by at least ``samples_per_cycle``
    samples.  Envelope extraction and period measurement rely on that.
    """

    samples_per_cycle: int = 64

    def __post_init__(self) -> None:
        if self.samples_per_cycle < 4:
            raise ValueError("samples_per_cycle must be >= 4")


@dataclass(frozen=True)
class IntegrationStats:
    """Step counts and the drift of the run's conserved quantity.

    ``max_drift`` is the Hamiltonian drift for conservative (zero or
    constant drive) runs, the normalization drift for spinor runs, and
    NaN when nothing is conserved.
    """

    n_accepted: int
    n_rejected: int
    max_drift: float


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the canonical equations of motion.

    State samples are stored as parallel arrays; ``delta``/``theta``
    columns are unwrapped (continuous).  Immutable after creation.
    """

    params: ModelParams
    drive: DriveSpec
    taus: np.ndarray
    alphas: np.ndarray
    deltas: np.ndarray
    thetas: np.ndarray
    integ_stats: IntegrationStats

    def __len__(self) -> int:
        return len(self.taus)

    def state(self, i: int) -> HdsState:
        return HdsState(float(self.alphas[i]), float(self.deltas[i]), float(self.thetas[i]))

    @property
    def states(self) -> list[HdsState]:
        return [self.state(i) for i in range(len(self))]

    def drive_values(self) -> np.ndarray:
        if self.drive.kind == "zero":
            return np.zeros_like(self.taus)
        if self.drive.kind == "constant":
            return np.full_like(self.taus, self.drive.value)
        return self.drive.value * np.sin(self.taus)

    def hamiltonian(self) -> np.ndarray:
        """H(tau) = sqrt(1-alpha^2) cos(delta) + alpha E(tau) at every sample."""
        return (np.sqrt(np.maximum(0.0, 1.0 - self.alphas**2)) * np.cos(self.deltas)
                + self.alphas * self.drive_values())


def hamiltonian_value(alpha: float, delta: float, drive_value: float) -> float:
    """H = sqrt(1-alpha^2) cos(delta) + alpha * E."""
    if abs(alpha) > 1.0:
        raise ValueError(f"|alpha| > 1: {alpha!r}")
    return math.sqrt(1.0 - alpha * alpha) * math.cos(delta) + alpha * drive_value


def hds_rhs(s: HdsState, drive: DriveSpec, tau: float) -> HdsDerivative:
    """Right-hand side of the canonical equations of motion at (s, tau).

    Raises PoleProximityError within 1e-12 of |alpha| = 1 where the
    chart is singular; callers must shorten the step or stop.
    """
    a = s.alpha
    if abs(a) >= 1.0 - _POLE_MARGIN:
        raise PoleProximityError(f"alpha = {a!r} too close to a pole")
    e = drive_eval(drive, tau)
    root = math.sqrt(1.0 - a * a)
    cd = math.cos(s.delta)
    return HdsDerivative(
        d_alpha=root * math.sin(s.delta),
        d_delta=-a * cd / root + e,
        d_theta=-0.5 * (math.sqrt((1.0 - a) / (1.0 + a)) * cd + e),
    )


def sample_grid(drive: DriveSpec, tau_span: tuple[float, float],
                sampling: SamplingSpec) -> np.ndarray:
    """Output grid covering the span with >= samples_per_cycle per fast cycle."""
    t0, t1 = float(tau_span[0]), float(tau_span[1])
    omega = math.sqrt(1.0 + drive.max_abs() ** 2)
    stride = 2.0 * math.pi / (sampling.samples_per_cycle * omega)
    n = max(2, int(math.ceil(abs(t1 - t0) / stride)) + 1)
    return np.linspace(t0, t1, n)


def integrate_hds(initial: HdsState, drive: DriveSpec,
                  tau_span: tuple[float, float],
                  tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
                  sampling: SamplingSpec | None = None,
                  params: ModelParams = ModelParams(),
                  max_steps: int = 20_000_000) -> Trajectory:
    """Integrate the canonical system over ``tau_span``.

    The integration runs in the chart ``phi = arcsin(alpha)`` (see
    :mod:`driven_qubit.integrator`); the returned samples are converted
    back to (alpha, delta, Theta) with delta and Theta unwrapped.

    Raises PoleEscapeError (with the partial trajectory attached) if the
    solution is driven onto a pole, StepBudgetError if ``max_steps`` is
    exhausted.
    """
    if abs(initial.alpha) >= 1.0:
        raise PoleProximityError(f"initial alpha = {initial.alpha!r} is on a pole")
    if tau_span[1] == tau_span[0]:
        raise ValueError("tau_span must have nonzero length")
    rtol, atol = tolerances
    if sampling is None:
        sampling = SamplingSpec()
    taus = sample_grid(drive, tau_span, sampling)
    y0 = np.array([math.asin(initial.alpha), initial.delta, initial.theta_overall])
    res = integrator.solve_fixed_grid(
        integrator.SYS_HDS, y0, tau_span, rtol, atol, taus,
        drive.code, drive.value, max_steps=max_steps,
    )
    n = res["n_filled"]
    samples = res["samples"][:n]
    traj = Trajectory(
        params=params,
        drive=drive,
        taus=taus[:n],
        alphas=np.sin(samples[:, 0]),
        deltas=samples[:, 1],
        thetas=samples[:, 2],
        integ_stats=_stats_for(res, drive, samples, taus[:n]),
    )
    if res["status"] == integrator.STATUS_STEP_UNDERFLOW:
        raise PoleEscapeError(
            f"integration stalled near tau = {res['tau_reached']:.6g} "
            f"(pole escape, |alpha| -> 1)", traj)
    if res["status"] == integrator.STATUS_BUDGET_EXCEEDED:
        raise StepBudgetError(
            f"step budget {max_steps} exhausted at tau = {res['tau_reached']:.6g}")
    return traj


def _stats_for(res: dict, drive: DriveSpec, samples: np.ndarray,
               taus: np.ndarray) -> IntegrationStats:
    if drive.kind in ("zero", "constant") and len(taus) > 0:
        a = np.sin(samples[:, 0])
        e = 0.0 if drive.kind == "zero" else drive.value
        h = np.sqrt(np.maximum(0.0, 1.0 - a**2)) * np.cos(samples[:, 1]) + a * e
        drift = float(np.max(np.abs(h - h[0]))) if len(h) else float("nan")
    else:
        drift = float("nan")
    return IntegrationStats(res["n_accepted"], res["n_rejected"], drift)


@dataclass(frozen=True)
class PeriodMeasurement:
    """Measured orbit period with circulation sense.

    ``sense`` is the circulation direction of the Bloch vector about the
    axis through the orbit centroid (+1 counterclockwise seen from
    outside the sphere); by our convention this maps to the sign of the
    Hamiltonian value of the orbit.  Around the delta=0, alpha=0 center
    the linearized flow is d alpha = delta, d delta = -alpha, which
    circulates counterclockwise about +x and has H > 0.
    """

    period: float
    sense: int
    n_crossings: int


def _crossing_times(taus: np.ndarray, series: np.ndarray) -> np.ndarray:
    """Upward crossing times of ``series`` through its mean, spline-refined."""
    x = series - series.mean()
    cs = CubicSpline(taus, x)
    roots = cs.roots(extrapolate=False)
    if roots.size == 0:
        return roots
    up = roots[cs(roots, 1) > 0]
    return np.sort(up)


def measure_period(traj: Trajectory, observable: str = "alpha") -> PeriodMeasurement:
    """Measure the orbit period of a trajectory from zero crossings.

    ``observable`` is ``"alpha"`` or ``"delta"`` (the latter treated
    modulo 2*pi: for rotating orbits the period is the time per winding).
    The trajectory must cover at least two full oscillations.
    """
    if observable not in ("alpha", "delta"):
        raise ValueError(f"unknown observable {observable!r}")
    taus = traj.taus
    if observable == "delta" and abs(traj.deltas[-1] - traj.deltas[0]) > 4.0 * math.pi:
        # rotating internal phase: crossings of successive 2*pi windings
        u = CubicSpline(taus, (traj.deltas - traj.deltas[0]) / (2.0 * math.pi))
        total = (traj.deltas[-1] - traj.deltas[0]) / (2.0 * math.pi)
        ks = np.arange(1, int(abs(total)) + 1) * (1 if total > 0 else -1)
        times = []
        for k in ks:
            r = u.solve(float(k), extrapolate=False)
            if r.size:
                times.append(r.min())
        times = np.asarray(times)
        if times.size < 2:
            raise NoOscillationError("fewer than two windings in the trajectory")
        period = float(np.polyfit(np.arange(times.size), times, 1)[0])
        return PeriodMeasurement(period, _orbit_sense(traj), int(times.size))

    series = traj.alphas if observable == "alpha" else traj.deltas
    times = _crossing_times(taus, series)
    if times.size < 2:
        raise NoOscillationError(f"fewer than two oscillations of {observable}")
    period = float(np.polyfit(np.arange(times.size), times, 1)[0])
    return PeriodMeasurement(period, _orbit_sense(traj), int(times.size))


def _orbit_sense(traj: Trajectory) -> int:
    """Circulation sense of the Bloch vector about the orbit centroid axis.

    Works uniformly for librating and pole-encircling orbits; the
    winding is measured in a right-handed frame whose third axis points
    from the sphere center through the orbit centroid.
    """
    rho = np.sqrt(np.maximum(0.0, 1.0 - traj.alphas**2))
    r = np.column_stack([rho * np.cos(traj.deltas),
                         rho * np.sin(traj.deltas),
                         traj.alphas])
    c = r.mean(axis=0)
    norm = np.linalg.norm(c)
    if norm < 1e-12:
        c = np.array([1.0, 0.0, 0.0])
    else:
        c = c / norm
    helper = np.array([0.0, 0.0, 1.0]) if abs(c[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(c, helper)
    u /= np.linalg.norm(u)
    v = np.cross(c, u)  # (u, v, c) right-handed
    ang = np.unwrap(np.arctan2(r @ v, r @ u))
    return 1 if ang[-1] - ang[0] > 0 else -1


def theta_advance_check(traj: Trajectory) -> float:
    """Overall-phase advance Theta(end) - Theta(start) over the trajectory.

    Meaningful when the trajectory spans exactly one measured orbit
    period of a conservative drive; an advance of -pi over one period
    is the spinor sign flip restored only after two periods.
    """
    return float(traj.thetas[-1] - traj.thetas[0])
