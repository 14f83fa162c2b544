"""Self-contained invariant suite: every structural property at desk scale.

Each check produces a name, a measured value, a threshold (pass means
measured <= threshold) and a runtime.  The suite is deterministic for a
pinned seed and is designed to finish in well under a minute.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import (DEFAULT_TOLERANCES, SamplingSpec, hamiltonian_value,
                       hds_rhs, integrate_hds, measure_period)
from .energy import (energy_sample_series, mean_energy, state_energies,
                     state_energies_from_phases,
                     variance_expectation_closed_form,
                     variance_expectation_matrix_route, variance_matrix)
from .experiments import envelope_report, run_weak_rabi, zeno_jump_schedule
from .model import (DriveSpec, HdsState, SpinorState, bloch_coords,
                    hds_from_spinor, spinor_from_hds)
from .oracle import (compare_trajectories, integrate_schrodinger,
                     spinor_mean_energy_series)

__all__ = ["CheckResult", "SuiteReport", "run_invariant_suite"]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    runtime: float


@dataclass(frozen=True)
class SuiteReport:
    checks: list[CheckResult]
    total_runtime: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self, include_runtime: bool = True) -> dict:
        """Report dict; runtimes are optional so pinned-seed reports stay
        byte-identical across runs."""
        out: dict = {"all_passed": self.all_passed, "checks": []}
        if include_runtime:
            out["total_runtime"] = round(self.total_runtime, 3)
        for c in self.checks:
            entry = {"name": c.name, "passed": c.passed,
                     "measured": format(c.measured, ".6g"),
                     "threshold": format(c.threshold, ".6g")}
            if include_runtime:
                entry["runtime"] = round(c.runtime, 3)
            out["checks"].append(entry)
        return out


def _random_hds(rng: np.random.Generator) -> HdsState:
    # declared distribution: alpha uniform on [-1, 1], angles on [0, 2 pi)
    return HdsState(rng.uniform(-1.0, 1.0), rng.uniform(0.0, TWO_PI),
                    rng.uniform(0.0, TWO_PI))


def _wrap_abs(x: float) -> float:
    r = abs(x) % TWO_PI
    return min(r, TWO_PI - r)


def run_invariant_suite(tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
                        seed: int = 20240817,
                        n_oracle_states: int = 100) -> SuiteReport:
    """Run every invariant check; see the module docstring for semantics."""
    rng = np.random.default_rng(seed)
    checks: list[CheckResult] = []
    t_suite = time.perf_counter()

    def record(name: str, measured: float, threshold: float, t0: float) -> None:
        checks.append(CheckResult(name, bool(measured <= threshold), float(measured),
                                  float(threshold), time.perf_counter() - t0))

    # ---- coordinate maps -------------------------------------------------
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        s = _random_hds(rng)
        if abs(s.alpha) > 1.0 - 1e-9:
            continue
        back, degenerate = hds_from_spinor(spinor_from_hds(s),
                                           phase_continuity_hint=s)
        worst = max(worst, abs(back.alpha - s.alpha),
                    _wrap_abs(back.delta - s.delta),
                    _wrap_abs(back.theta_overall - s.theta_overall),
                    1.0 if degenerate else 0.0)
    record("roundtrip-identity", worst, 1e-12, t0)

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        s = _random_hds(rng)
        b = bloch_coords(s)
        worst = max(worst, abs(math.cos(b.theta) - s.alpha))
    record("bloch-alpha-consistency", worst, 1e-14, t0)

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        p = spinor_from_hds(_random_hds(rng))
        worst = max(worst, abs(p.norm_sq() - 1.0))
    record("spinor-normalization", worst, 1e-14, t0)

    # ---- canonical dynamics ----------------------------------------------
    t0 = time.perf_counter()
    traj = integrate_hds(HdsState(0.3, 0.2, 0.0), DriveSpec.zero(), (0.0, 40.0),
                         tolerances=tolerances)
    h = traj.taus[1] - traj.taus[0]
    fd_a = (traj.alphas[2:] - traj.alphas[:-2]) / (2 * h)
    fd_d = (traj.deltas[2:] - traj.deltas[:-2]) / (2 * h)
    fd_t = (traj.thetas[2:] - traj.thetas[:-2]) / (2 * h)
    worst = 0.0
    for i in range(1, len(traj) - 1):
        der = hds_rhs(traj.state(i), traj.drive, traj.taus[i])
        worst = max(worst, abs(fd_a[i - 1] - der.d_alpha),
                    abs(fd_d[i - 1] - der.d_delta),
                    abs(fd_t[i - 1] - der.d_theta))
    record("rhs-finite-difference", worst, h * h, t0)

    t0 = time.perf_counter()
    traj = integrate_hds(HdsState(0.2, 0.4, 0.0), DriveSpec.constant(0.5),
                         (0.0, 2000.0), tolerances=tolerances)
    record("hamiltonian-conservation", traj.integ_stats.max_drift, 1e-9, t0)

    t0 = time.perf_counter()
    worst = 0.0
    for e in (0.0, 0.25, 0.5, 1.0):
        drive = DriveSpec.zero() if e == 0.0 else DriveSpec.constant(e)
        for start in (HdsState(0.3, 0.0, 0.0), HdsState(-0.3, math.pi, 0.0)):
            traj = integrate_hds(start, drive, (0.0, 40.0), tolerances=tolerances)
            m = measure_period(traj)
            omega = TWO_PI / m.period
            h0 = hamiltonian_value(start.alpha, start.delta, e)
            worst = max(worst, abs(omega - math.sqrt(1.0 + e * e)),
                        0.0 if m.sense == (1 if h0 > 0 else -1) else 1.0)
    record("frequency-law", worst, 1e-6, t0)

    t0 = time.perf_counter()
    start = HdsState(0.35, 1.1, 0.2)
    fwd = integrate_hds(start, DriveSpec.constant(0.5), (0.0, 100.0),
                        tolerances=tolerances)
    end = fwd.state(len(fwd) - 1)
    back = integrate_hds(end, DriveSpec.constant(0.5), (100.0, 0.0),
                         tolerances=tolerances)
    got = back.state(len(back) - 1)
    worst = max(abs(got.alpha - start.alpha), abs(got.delta - start.delta),
                abs(got.theta_overall - start.theta_overall))
    record("time-reversibility", worst, 1e-8, t0)

    # ---- dual-integrator oracle ------------------------------------------
    t0 = time.perf_counter()
    drives = [DriveSpec.zero(), DriveSpec.constant(0.5),
              DriveSpec.sinusoidal(8e-3)]
    sampling = SamplingSpec(samples_per_cycle=16)
    worst = 0.0
    for _ in range(n_oracle_states):
        while True:
            s = _random_hds(rng)
            # stay off the separatrix through the poles
            if abs(s.alpha) < 0.95 and abs(hamiltonian_value(s.alpha, s.delta, 0.0)) > 0.05:
                break
        for drive in drives:
            try:
                hds = integrate_hds(s, drive, (0.0, 200.0),
                                    tolerances=tolerances, sampling=sampling)
                sp = integrate_schrodinger(spinor_from_hds(s), drive,
                                           (0.0, 200.0), tolerances=tolerances,
                                           sampling=sampling)
                rep = compare_trajectories(hds, sp)
            except Exception:
                # a blown-up integration (e.g. corrupted tolerances) is a
                # failed equivalence check, not a suite crash
                worst = math.inf
                continue
            worst = max(worst, rep.max_abs_alpha_diff, rep.max_abs_delta_diff,
                        rep.max_abs_theta_diff, rep.max_energy_diff)
    record("oracle-equivalence", worst, 1e-6, t0)

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        p = spinor_from_hds(_random_hds(rng))
        e = rng.uniform(-1.0, 1.0)
        mapped, degenerate = hds_from_spinor(p)
        if degenerate:
            continue
        worst = max(worst, abs(mean_energy(p, e)
                               - hamiltonian_value(mapped.alpha, mapped.delta, e)))
    record("mean-energy-link", worst, 1e-12, t0)

    t0 = time.perf_counter()
    sp = integrate_schrodinger(SpinorState(1.0, 0.0), DriveSpec.zero(),
                               (0.0, 2000.0), tolerances=tolerances)
    record("unitarity-drift", sp.integ_stats.max_drift, 1e-9, t0)

    # ---- energy statistics (shared weak-drive run) -----------------------
    t0 = time.perf_counter()
    run = run_weak_rabi(8e-3, 1.0, tolerances=tolerances)
    es = run.energy_series
    wa = (1.0 + es.alpha) / 2.0
    wb = (1.0 - es.alpha) / 2.0
    finite = np.isfinite(es.E_a) & np.isfinite(es.E_b)
    mix = np.abs(wa[finite] * es.E_a[finite] + wb[finite] * es.E_b[finite]
                 - es.H_mean[finite])
    record("mixture-identity", float(mix.max()), 1e-12, t0)

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        s = _random_hds(rng)
        p = spinor_from_hds(s)
        e = rng.uniform(-1.0, 1.0)
        # the closed form takes the canonical (coupling-free) H value
        hm = hamiltonian_value(s.alpha, s.delta, e)
        for K in (0.5, 1.0, 2.0):
            V = variance_matrix(hm, e, K)
            H = np.array([[e, K], [K, -e]], dtype=float)
            D = H - hm * np.eye(2)
            worst = max(
                worst,
                abs(variance_expectation_matrix_route(p, V)
                    - variance_expectation_closed_form(hm, e, s.alpha, K)),
                float(np.max(np.abs(V - D @ D))),
            )
    closed = es.drive_value**2 - es.H_mean**2 + 1.0
    worst = max(worst, float(np.max(np.abs(es.V_expect - closed))))
    record("dual-route-variance", worst, 1e-12, t0)

    t0 = time.perf_counter()
    worst = 0.0
    traj = run.trajectory
    for i in range(0, len(traj), 7):
        ea2, eb2 = state_energies_from_phases(traj, i)
        ea1, eb1 = state_energies(float(traj.alphas[i]), float(es.H_mean[i]),
                                  float(es.drive_value[i]))
        if math.isfinite(ea1) and math.isfinite(eb1):
            worst = max(worst, abs(ea1 - ea2), abs(eb1 - eb2))
    record("phase-route-identity", worst, 1e-10, t0)

    t0 = time.perf_counter()
    eigen = integrate_hds(HdsState(0.0, 0.0, 0.0), DriveSpec.zero(),
                          (0.0, 20.0), tolerances=tolerances)
    ees = energy_sample_series(eigen)
    worst = max(float(np.max(ees.sigma_q)), float(np.max(ees.sigma_a)),
                float(np.max(ees.sigma_b)),
                float(np.max(np.abs(ees.E_a - 1.0))),
                float(np.max(np.abs(ees.E_b - 1.0))))
    record("eigenstate-nullity", worst, 1e-9, t0)

    t0 = time.perf_counter()
    record("variance-nonnegativity", max(0.0, -float(np.min(es.V_expect))),
           1e-12, t0)

    # ---- weak-drive experiments ------------------------------------------
    t0 = time.perf_counter()
    worst = 0.0
    reports = {}
    runs = {8e-3: run}
    for A in (4e-3, 8e-3, 1.6e-2):
        r = runs.get(A) or run_weak_rabi(A, 1.0, tolerances=tolerances)
        runs[A] = r
        resid = np.max(np.abs(r.energy_series.H_mean
                              - np.cos(A * r.trajectory.taus / 2.0)))
        worst = max(worst, float(resid) / (2.0 * A))
        reports[A] = envelope_report(r)
    record("rabi-envelope", worst, 1.0, t0)

    t0 = time.perf_counter()
    record("envelope-exceedance", reports[8e-3].exceedance_fraction, 0.05, t0)

    t0 = time.perf_counter()
    A = 8e-3
    sched = zeno_jump_schedule(A, +1, 0.0, 4.0 * run.rabi_period,
                               delta_h_max=reports[A].dh_max)
    jumps = sched.jump_taus
    worst = max(abs(math.cos(A * tj / 2.0)) / 0.02 for tj in jumps)
    spacing = np.diff(jumps)
    worst = max(worst, float(np.max(np.abs(spacing - TWO_PI / A))) / (0.01 * TWO_PI / A))
    ground = zeno_jump_schedule(A, -1, TWO_PI / A, 4.0 * run.rabi_period,
                                delta_h_max=reports[A].dh_max)
    # half-period band symmetry: both first exits sit where |H| = O(A)
    worst = max(worst,
                abs(math.cos(A * ground.jump_taus[0] / 2.0)) / 0.02)
    record("zeno-jump-structure", worst, 1.0, t0)

    t0 = time.perf_counter()
    worst = 0.0
    for A, rep in reports.items():
        worst = max(worst, abs(rep.dh_max / (A / 2.0) - 1.0))
    record("window-scaling", worst, 0.20, t0)

    # ---- 4 pi spinor symmetry --------------------------------------------
    t0 = time.perf_counter()
    sp = integrate_schrodinger(SpinorState(1.0, 0.0), DriveSpec.zero(),
                               (0.0, 4.0 * math.pi), tolerances=tolerances)
    i_half = int(np.argmin(np.abs(sp.taus - TWO_PI)))
    worst = max(abs(sp.psi_a[i_half] + 1.0), abs(sp.psi_b[i_half]),
                abs(sp.psi_a[-1] - 1.0), abs(sp.psi_b[-1]))
    record("4pi-symmetry", worst, 1e-8, t0)

    return SuiteReport(checks, time.perf_counter() - t_suite)
