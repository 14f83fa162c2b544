"""Energy observables: mean energy, state energies, and the variance operator.

The mean energy admits a state-energy decomposition

    <H> = |psi_a|^2 E_a + |psi_b|^2 E_b,
    E_a = (H + E)/(1 + alpha),   E_b = (H - E)/(1 - alpha),

where the state energies are equally the phase derivatives
``E_a = -2 dTheta/dtau`` and ``E_b = -2 d(Theta+delta)/dtau``.  The
statistical spread is captured by the Hermitian variance operator
``V = (H_op - <H> I)^2`` whose expectation has the closed form

    <V> = (1 - 2K) H^2 + 2 (K - 1) alpha E H + E^2 + K^2

reducing to ``E^2 - H^2 + 1`` at the default coupling K = 1.  Both
routes are implemented and checked against each other.

State-energy standard deviations are stored as nonnegative magnitudes;
plots mirror them.  At a pole |alpha| = 1 the degenerate member's state
energy diverges with vanishing weight: the weighted mixture stays finite
(the contribution is (H -+ E)/2 analytically) but the sample is flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, hamiltonian_value
from .model import DriveSpec, ModelParams, SpinorState, hds_from_spinor

__all__ = [
    "EnergySample",
    "EnergySeries",
    "mean_energy",
    "state_energies",
    "state_energies_from_phases",
    "state_sigmas",
    "variance_matrix",
    "variance_expectation_matrix_route",
    "variance_expectation_closed_form",
    "sigma_q",
    "generalized_variance",
    "energy_sample_series",
]

_POLE_WEIGHT = 1e-12  # |psi|^2 below this counts as a degenerate member


@dataclass(frozen=True)
class EnergySample:
    """All energy observables evaluated at one trajectory sample."""

    tau: float
    H_mean: float
    E_a: float
    E_b: float
    sigma_a: float
    sigma_b: float
    V_expect: float
    sigma_q: float
    drive_value: float
    alpha: float
    degenerate: bool = False


class EnergySeries:
    """Column-wise energy observables along a trajectory.

    Behaves as a sequence of :class:`EnergySample` while keeping the
    underlying numpy arrays accessible as attributes.
    """

    _COLUMNS = ("tau", "H_mean", "E_a", "E_b", "sigma_a", "sigma_b",
                "V_expect", "sigma_q", "drive_value", "alpha")

    def __init__(self, **columns: np.ndarray):
        sizes = {len(v) for v in columns.values()}
        if len(sizes) > 1:
            raise ValueError("energy series columns must share one length")
        for name in self._COLUMNS + ("degenerate",):
            setattr(self, name, columns[name])

    def __len__(self) -> int:
        return len(self.tau)

    def __getitem__(self, i: int) -> EnergySample:
        return EnergySample(
            **{name: getattr(self, name)[i].item() for name in self._COLUMNS},
            degenerate=bool(self.degenerate[i]),
        )


def mean_energy(p: SpinorState, drive_value: float,
                params: ModelParams = ModelParams()) -> float:
    """<psi|H|psi> with H = [[E, K], [K, -E]].

    Equals the Hamiltonian value of the mapped canonical state at the
    default coupling K = 1.
    """
    p.require_normalized()
    alpha = abs(p.psi_a) ** 2 - abs(p.psi_b) ** 2
    cross = 2.0 * (p.psi_a.conjugate() * p.psi_b).real
    return drive_value * alpha + params.K * cross


def state_energies(alpha: float, H_mean: float, drive_value: float) -> tuple[float, float]:
    """State energies (E_a, E_b); the degenerate member is +-inf at a pole."""
    wa = 1.0 + alpha
    wb = 1.0 - alpha
    ea = (H_mean + drive_value) / wa if wa > _POLE_WEIGHT else math.inf
    eb = (H_mean - drive_value) / wb if wb > _POLE_WEIGHT else math.inf
    return ea, eb


def state_energies_from_phases(traj: Trajectory, index: int) -> tuple[float, float]:
    """State energies from the phase-derivative route at one sample.

    Uses the closed-form equations of motion for dTheta/dtau and
    ddelta/dtau at the sample (not finite differences, which are kept
    for test oracles only): ``E_a = -2 dTheta``, ``E_b = -2 d(Theta+delta)``.
    """
    if not 0 <= index < len(traj):
        raise IndexError(index)
    a = float(traj.alphas[index])
    d = float(traj.deltas[index])
    e = float(traj.drive_values()[index])
    root = math.sqrt(1.0 - a * a)
    cd = math.cos(d)
    d_theta = -0.5 * (math.sqrt((1.0 - a) / (1.0 + a)) * cd + e)
    d_delta = -a * cd / root + e
    return -2.0 * d_theta, -2.0 * (d_theta + d_delta)


def state_sigmas(alpha: float, E_a: float, E_b: float,
                 H_mean: float) -> tuple[float, float]:
    """Nonnegative state-energy standard deviations.

    sigma_{a,b} = sqrt(|psi_{a,b}|^2) * |E_{a,b} - H|; infinite for a
    pole-degenerate member (vanishing weight times divergent energy).
    """
    wa = max(0.0, (1.0 + alpha) / 2.0)
    wb = max(0.0, (1.0 - alpha) / 2.0)
    sa = math.sqrt(wa) * abs(E_a - H_mean) if math.isfinite(E_a) else math.inf
    sb = math.sqrt(wb) * abs(E_b - H_mean) if math.isfinite(E_b) else math.inf
    return sa, sb


def variance_matrix(H_mean: float, drive_value: float, K: float = 1.0) -> np.ndarray:
    """The 2x2 variance operator (H_op - H I)^2 in closed form."""
    h, e = H_mean, drive_value
    return np.array([
        [(h - e) ** 2 + K * K, -2.0 * K * h],
        [-2.0 * K * h, (h + e) ** 2 + K * K],
    ])


def variance_expectation_matrix_route(p: SpinorState, V: np.ndarray) -> float:
    """<psi|V|psi>; must come out real and nonnegative (within 1e-12 slack)."""
    p.require_normalized()
    psi = np.array([p.psi_a, p.psi_b])
    val = float(np.real(np.conj(psi) @ (V @ psi)))
    if val < -1e-12:
        raise ValueError(f"negative variance expectation {val!r}: inconsistent inputs")
    return val


def variance_expectation_closed_form(H_mean: float, drive_value: float,
                                     alpha: float, K: float = 1.0) -> float:
    """<V> = (1-2K) H^2 + 2(K-1) alpha E H + E^2 + K^2 (alpha drops out at K=1)."""
    h, e = H_mean, drive_value
    return (1.0 - 2.0 * K) * h * h + 2.0 * (K - 1.0) * alpha * e * h + e * e + K * K


def sigma_q(V_expect: float) -> float:
    """Standard deviation sqrt(<V>), clamping tiny negative roundoff."""
    if V_expect < -1e-12:
        raise ValueError(f"variance expectation is negative: {V_expect!r}")
    return math.sqrt(max(V_expect, 0.0))


def generalized_variance(observable: np.ndarray,
                         p: SpinorState) -> tuple[float, float, float]:
    """Expectation, variance and standard deviation of any 2x2 Hermitian observable.

    The variance operator is (O - <O> I)^2; the energy case is recovered
    with O equal to the Hamiltonian matrix.
    """
    O = np.asarray(observable, dtype=complex)
    if O.shape != (2, 2) or np.max(np.abs(O - O.conj().T)) > 1e-12:
        raise ValueError("observable must be a 2x2 Hermitian matrix")
    p.require_normalized()
    psi = np.array([p.psi_a, p.psi_b])
    expect = float(np.real(np.conj(psi) @ (O @ psi)))
    D = O - expect * np.eye(2)
    var = float(np.real(np.conj(psi) @ (D @ D @ psi)))
    return expect, var, math.sqrt(max(var, 0.0))


def energy_sample_series(traj: Trajectory) -> EnergySeries:
    """Evaluate every energy observable at every trajectory sample."""
    a = traj.alphas
    e = traj.drive_values()
    h = traj.hamiltonian()
    K = traj.params.K

    wa = (1.0 + a) / 2.0
    wb = (1.0 - a) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ea = np.where(wa > _POLE_WEIGHT / 2, (h + e) / (1.0 + a), np.inf)
        eb = np.where(wb > _POLE_WEIGHT / 2, (h - e) / (1.0 - a), np.inf)
        sa = np.where(np.isfinite(ea), np.sqrt(np.maximum(wa, 0.0)) * np.abs(ea - h), np.inf)
        sb = np.where(np.isfinite(eb), np.sqrt(np.maximum(wb, 0.0)) * np.abs(eb - h), np.inf)
    v = (1.0 - 2.0 * K) * h * h + 2.0 * (K - 1.0) * a * e * h + e * e + K * K
    return EnergySeries(
        tau=traj.taus.copy(),
        H_mean=h,
        E_a=ea,
        E_b=eb,
        sigma_a=sa,
        sigma_b=sb,
        V_expect=v,
        sigma_q=np.sqrt(np.maximum(v, 0.0)),
        drive_value=e,
        alpha=a.copy(),
        degenerate=(wa <= _POLE_WEIGHT / 2) | (wb <= _POLE_WEIGHT / 2),
    )
