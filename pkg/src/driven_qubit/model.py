"""Core model: reduced units, drive, and the spinor/canonical/Bloch coordinate maps.

The driven two-level system is described interchangeably by

* a normalized spinor ``(psi_a, psi_b)``,
* canonical coordinates ``(alpha, delta)`` plus the slaved overall phase
  ``Theta`` (population imbalance, internal phase, global phase), or
* Bloch-sphere angles ``(theta, phi)``.

All conversions here are exact algebraic maps.  Reduced units are
``K = 1``, ``hbar = 2``, ``Omega = 1``; the dimensionless time is
``tau = Omega * t``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "ModelParams",
    "DriveSpec",
    "SpinorState",
    "HdsState",
    "BlochCoords",
    "DegenerateStateError",
    "drive_eval",
    "spinor_from_hds",
    "hds_from_spinor",
    "bloch_coords",
]

#: amplitude below which the internal phase of a spinor component is
#: numerically meaningless (pole of the canonical chart)
POLE_AMPLITUDE = 1e-8

#: slack accepted on |alpha| <= 1 before declaring integrator escape
ALPHA_SLACK = 1e-12


class DegenerateStateError(ValueError):
    """Raised when an operation is evaluated at a pole |alpha| = 1 where it is undefined."""


@dataclass(frozen=True)
class ModelParams:
    """Static model constants in reduced units.

    ``K`` is the off-diagonal coupling of the two-level Hamiltonian,
    ``hbar`` the reduced action unit and ``Omega`` the reference
    frequency.  The defaults ``K=1, hbar=2, Omega=1`` are assumed
    throughout unless stated otherwise.
    """

    K: float = 1.0
    hbar: float = 2.0
    Omega: float = 1.0

    def __post_init__(self) -> None:
        if not self.K > 0:
            raise ValueError(f"coupling K must be positive, got {self.K}")


@dataclass(frozen=True)
class DriveSpec:
    """External energy drive, evaluated in reduced time.

    ``kind`` is one of ``"zero"``, ``"constant"`` or ``"sinusoidal"``.
    A sinusoidal drive evaluates to ``value * sin(tau)`` exactly (a
    resonant Rabi drive when ``value`` is small).
    """

    kind: str
    value: float = 0.0

    _CODES = {"zero": 0, "constant": 1, "sinusoidal": 2}

    def __post_init__(self) -> None:
        if self.kind not in self._CODES:
            raise ValueError(f"unknown drive kind {self.kind!r}")
        if self.kind == "sinusoidal" and self.value < 0:
            raise ValueError("sinusoidal drive amplitude must be >= 0")

    @classmethod
    def zero(cls) -> "DriveSpec":
        return cls("zero")

    @classmethod
    def constant(cls, value: float) -> "DriveSpec":
        return cls("constant", float(value))

    @classmethod
    def sinusoidal(cls, amplitude: float) -> "DriveSpec":
        return cls("sinusoidal", float(amplitude))

    @property
    def code(self) -> int:
        """Integer tag used by the compiled integrator kernels."""
        return self._CODES[self.kind]

    def max_abs(self) -> float:
        """Largest |drive value| ever attained (used to pick sampling strides)."""
        return 0.0 if self.kind == "zero" else abs(self.value)

    def __call__(self, tau: float) -> float:
        return drive_eval(self, tau)


def drive_eval(drive: DriveSpec, tau: float) -> float:
    """Evaluate the drive energy at reduced time ``tau``."""
    if drive.kind == "zero":
        return 0.0
    if drive.kind == "constant":
        return drive.value
    return drive.value * math.sin(tau)


@dataclass(frozen=True)
class SpinorState:
    """Two complex amplitudes of the qubit wavefunction."""

    psi_a: complex
    psi_b: complex

    def norm_sq(self) -> float:
        return abs(self.psi_a) ** 2 + abs(self.psi_b) ** 2

    def require_normalized(self, tol: float = 1e-9) -> None:
        if abs(self.norm_sq() - 1.0) > tol:
            raise ValueError(f"spinor not normalized: |psi|^2 = {self.norm_sq()!r}")


@dataclass(frozen=True)
class HdsState:
    """Canonical coordinates (alpha, delta) plus the slaved overall phase Theta.

    ``delta`` and ``theta_overall`` are continuous (unwrapped) angles along
    a trajectory, not reduced to a principal branch.
    """

    alpha: float
    delta: float
    theta_overall: float

    def __post_init__(self) -> None:
        if abs(self.alpha) > 1.0 + ALPHA_SLACK:
            raise ValueError(f"|alpha| > 1: {self.alpha!r}")


@dataclass(frozen=True)
class BlochCoords:
    """Angular position on the Bloch sphere: polar ``theta``, azimuth ``phi``."""

    theta: float
    phi: float


def spinor_from_hds(s: HdsState) -> SpinorState:
    """Map canonical coordinates to the spinor.

    ``psi_a = sqrt((1+alpha)/2) e^{i Theta}``,
    ``psi_b = sqrt((1-alpha)/2) e^{i (Theta+delta)}``.
    The result is normalized by construction.
    """
    a = min(1.0, max(-1.0, s.alpha))
    ra = math.sqrt((1.0 + a) / 2.0)
    rb = math.sqrt((1.0 - a) / 2.0)
    return SpinorState(
        psi_a=ra * cmath.exp(1j * s.theta_overall),
        psi_b=rb * cmath.exp(1j * (s.theta_overall + s.delta)),
    )


def _unwrap_near(angle: float, reference: float) -> float:
    """Shift ``angle`` by a multiple of 2*pi onto the branch nearest ``reference``."""
    two_pi = 2.0 * math.pi
    k = round((reference - angle) / two_pi)
    return angle + two_pi * k


def hds_from_spinor(
    p: SpinorState, phase_continuity_hint: HdsState | None = None
) -> tuple[HdsState, bool]:
    """Invert the spinor map; returns ``(state, degenerate)``.

    ``alpha = |psi_a|^2 - |psi_b|^2``, ``Theta = arg psi_a``,
    ``delta = arg psi_b - arg psi_a``.  With a hint, ``delta`` and
    ``Theta`` are unwrapped onto the branch nearest the hint.  At the
    poles (one amplitude ~ 0) the undefined phase is taken from the hint
    (or 0) and the degeneracy flag is set.
    """
    p.require_normalized()
    aa = abs(p.psi_a)
    ab = abs(p.psi_b)
    alpha = aa * aa - ab * ab
    degenerate = aa < POLE_AMPLITUDE or ab < POLE_AMPLITUDE

    hint_delta = phase_continuity_hint.delta if phase_continuity_hint else 0.0
    hint_theta = phase_continuity_hint.theta_overall if phase_continuity_hint else 0.0

    if aa < POLE_AMPLITUDE:
        # Theta undefined; keep continuity with the hint.
        theta = hint_theta
        delta = cmath.phase(p.psi_b) - theta
    else:
        theta = cmath.phase(p.psi_a)
        if ab < POLE_AMPLITUDE:
            delta = hint_delta
        else:
            delta = cmath.phase(p.psi_b) - theta

    if phase_continuity_hint is not None:
        theta = _unwrap_near(theta, hint_theta)
        if not degenerate:
            delta = _unwrap_near(delta, hint_delta)

    return HdsState(alpha=alpha, delta=delta, theta_overall=theta), degenerate


def bloch_coords(s: HdsState) -> BlochCoords:
    """Bloch angles: ``theta = arccos(alpha)``, ``phi = Theta + delta/2``."""
    a = min(1.0, max(-1.0, s.alpha))
    return BlochCoords(theta=math.acos(a), phi=s.theta_overall + 0.5 * s.delta)
