"""Direct two-level Schrodinger integration, used as an independent oracle.

In reduced units the wave equation reads

    d psi / d tau = -(i/2) [[E(tau), 1], [1, -E(tau)]] psi

so the undriven eigenfrequencies are +-1/2 and the eigenstate splitting
is sqrt(1 + E^2) for a constant drive, matching the canonical system's
orbit frequency.  No renormalization is performed during integration;
the norm drift is kept as a quality metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import integrator
from .dynamics import (DEFAULT_TOLERANCES, IntegrationStats, SamplingSpec,
                       StepBudgetError, Trajectory, sample_grid)
from .model import DriveSpec, ModelParams, SpinorState, drive_eval, hds_from_spinor

__all__ = [
    "SpinorTrajectory",
    "DivergenceReport",
    "schrodinger_rhs",
    "integrate_schrodinger",
    "spinor_mean_energy_series",
    "compare_trajectories",
]


@dataclass(frozen=True)
class SpinorTrajectory:
    """Sampled solution of the two-level Schrodinger equation."""

    params: ModelParams
    drive: DriveSpec
    taus: np.ndarray
    psi_a: np.ndarray
    psi_b: np.ndarray
    integ_stats: IntegrationStats

    def __len__(self) -> int:
        return len(self.taus)

    def state(self, i: int) -> SpinorState:
        return SpinorState(complex(self.psi_a[i]), complex(self.psi_b[i]))

    def norms_sq(self) -> np.ndarray:
        return np.abs(self.psi_a) ** 2 + np.abs(self.psi_b) ** 2

    def drive_values(self) -> np.ndarray:
        if self.drive.kind == "zero":
            return np.zeros_like(self.taus)
        if self.drive.kind == "constant":
            return np.full_like(self.taus, self.drive.value)
        return self.drive.value * np.sin(self.taus)


@dataclass(frozen=True)
class DivergenceReport:
    """Maximum deviations between a canonical and a spinor trajectory."""

    max_abs_alpha_diff: float
    max_abs_delta_diff: float
    max_abs_theta_diff: float
    max_energy_diff: float
    tau_of_max: float


def schrodinger_rhs(p: SpinorState, drive: DriveSpec, tau: float) -> tuple[complex, complex]:
    """d psi / d tau for both components at (p, tau)."""
    e = drive_eval(drive, tau)
    return (
        -0.5j * (e * p.psi_a + p.psi_b),
        -0.5j * (p.psi_a - e * p.psi_b),
    )


def integrate_schrodinger(initial: SpinorState, drive: DriveSpec,
                          tau_span: tuple[float, float],
                          tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
                          sampling: SamplingSpec | None = None,
                          params: ModelParams = ModelParams(),
                          max_steps: int = 20_000_000) -> SpinorTrajectory:
    """Integrate the wave equation over ``tau_span`` (same grid rules as integrate_hds)."""
    initial.require_normalized()
    if tau_span[1] == tau_span[0]:
        raise ValueError("tau_span must have nonzero length")
    rtol, atol = tolerances
    if sampling is None:
        sampling = SamplingSpec()
    taus = sample_grid(drive, tau_span, sampling)
    y0 = np.array([initial.psi_a.real, initial.psi_a.imag,
                   initial.psi_b.real, initial.psi_b.imag])
    res = integrator.solve_fixed_grid(
        integrator.SYS_SCHRODINGER, y0, tau_span, rtol, atol, taus,
        drive.code, drive.value, max_steps=max_steps,
    )
    if res["status"] == integrator.STATUS_BUDGET_EXCEEDED:
        raise StepBudgetError(
            f"step budget {max_steps} exhausted at tau = {res['tau_reached']:.6g}")
    if res["status"] != integrator.STATUS_OK:
        raise RuntimeError(
            f"spinor integration stalled at tau = {res['tau_reached']:.6g}")
    s = res["samples"]
    psi_a = s[:, 0] + 1j * s[:, 1]
    psi_b = s[:, 2] + 1j * s[:, 3]
    drift = float(np.max(np.abs(np.abs(psi_a) ** 2 + np.abs(psi_b) ** 2 - 1.0)))
    return SpinorTrajectory(
        params=params, drive=drive, taus=taus,
        psi_a=psi_a, psi_b=psi_b,
        integ_stats=IntegrationStats(res["n_accepted"], res["n_rejected"], drift),
    )


def spinor_mean_energy_series(traj: SpinorTrajectory) -> np.ndarray:
    """<psi|H|psi> at every sample, computed directly from the amplitudes."""
    e = traj.drive_values()
    alpha = np.abs(traj.psi_a) ** 2 - np.abs(traj.psi_b) ** 2
    cross = 2.0 * np.real(np.conj(traj.psi_a) * traj.psi_b)
    return e * alpha + traj.params.K * cross


def _wrapped_abs(x: np.ndarray) -> np.ndarray:
    """|x| reduced modulo 2*pi into [0, pi]."""
    two_pi = 2.0 * math.pi
    r = np.abs(np.remainder(x, two_pi))
    return np.minimum(r, two_pi - r)


def compare_trajectories(hds: Trajectory, spinor: SpinorTrajectory) -> DivergenceReport:
    """Deviations between the two integration routes on a shared grid.

    Spinor samples are mapped through the inverse coordinate map with
    phase-continuity hints taken from the previous mapped sample, then
    compared pointwise.  The reported ``tau_of_max`` locates the largest
    alpha deviation.
    """
    if len(hds) != len(spinor) or not np.allclose(hds.taus, spinor.taus, atol=1e-9):
        raise ValueError("trajectories are not sampled on the same tau grid")
    if len(hds) == 0:
        return DivergenceReport(0.0, 0.0, 0.0, 0.0, 0.0)

    n = len(hds)
    alphas = np.empty(n)
    deltas = np.empty(n)
    thetas = np.empty(n)
    hint = hds.state(0)
    for i in range(n):
        mapped, _ = hds_from_spinor(spinor.state(i), phase_continuity_hint=hint)
        alphas[i] = mapped.alpha
        deltas[i] = mapped.delta
        thetas[i] = mapped.theta_overall
        hint = mapped

    d_alpha = np.abs(alphas - hds.alphas)
    d_delta = _wrapped_abs(deltas - hds.deltas)
    d_theta = _wrapped_abs(thetas - hds.thetas)
    d_energy = np.abs(spinor_mean_energy_series(spinor) - hds.hamiltonian())
    imax = int(np.argmax(d_alpha))
    return DivergenceReport(
        max_abs_alpha_diff=float(d_alpha.max()),
        max_abs_delta_diff=float(d_delta.max()),
        max_abs_theta_diff=float(d_theta.max()),
        max_energy_diff=float(d_energy.max()),
        tau_of_max=float(hds.taus[imax]),
    )
