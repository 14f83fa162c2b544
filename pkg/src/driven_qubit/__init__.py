"""Exact (no rotating-wave approximation) driven two-level qubit dynamics.

Simulates the qubit through two equivalent routes, the canonical
Hamiltonian formulation in (alpha, delta) with slaved overall phase and
the direct Schrodinger equation, and derives the energy-variance
observables (state energies, sigma bands, quantum standard deviation)
together with the weak-Rabi-drive and quantum-Zeno-jump experiments.
"""

from .dynamics import (DEFAULT_TOLERANCES, HdsDerivative, IntegrationStats,
                       NoOscillationError, PeriodMeasurement, PoleEscapeError,
                       PoleProximityError, SamplingSpec, StepBudgetError,
                       Trajectory, hamiltonian_value, hds_rhs, integrate_hds,
                       measure_period, theta_advance_check)
from .energy import (EnergySample, EnergySeries, energy_sample_series,
                     generalized_variance, mean_energy, sigma_q,
                     state_energies, state_energies_from_phases, state_sigmas,
                     variance_expectation_closed_form,
                     variance_expectation_matrix_route, variance_matrix)
from .experiments import (EnvelopeReport, ExperimentOverlay,
                          OverlayFormatError, RabiRun, SigmaBand, ZenoSchedule,
                          ZenoSegment, envelope_report, heisenberg_jump_window,
                          ingest_experiment_overlay, run_weak_rabi, sigma_band,
                          zeno_jump_schedule)
from .model import (BlochCoords, DegenerateStateError, DriveSpec, HdsState,
                    ModelParams, SpinorState, bloch_coords, drive_eval,
                    hds_from_spinor, spinor_from_hds)
from .oracle import (DivergenceReport, SpinorTrajectory, compare_trajectories,
                     integrate_schrodinger, schrodinger_rhs,
                     spinor_mean_energy_series)
from .serialize import (Table, energy_table, read_schedule_json, read_table,
                        schedule_table, trajectory_table, write_schedule_json,
                        write_table)
from .suite import CheckResult, SuiteReport, run_invariant_suite

__version__ = "0.1.0"

__all__ = [
    "BlochCoords", "CheckResult", "DEFAULT_TOLERANCES", "DegenerateStateError",
    "DivergenceReport", "DriveSpec", "EnergySample", "EnergySeries",
    "EnvelopeReport", "ExperimentOverlay", "HdsDerivative", "HdsState",
    "IntegrationStats", "ModelParams", "NoOscillationError",
    "OverlayFormatError", "PeriodMeasurement", "PoleEscapeError",
    "PoleProximityError", "RabiRun", "SamplingSpec", "SigmaBand",
    "SpinorState", "SpinorTrajectory", "StepBudgetError", "SuiteReport",
    "Table", "Trajectory", "ZenoSchedule", "ZenoSegment", "bloch_coords",
    "compare_trajectories", "drive_eval", "energy_sample_series",
    "energy_table", "envelope_report", "generalized_variance",
    "hamiltonian_value", "hds_from_spinor", "hds_rhs",
    "heisenberg_jump_window", "ingest_experiment_overlay",
    "integrate_hds", "integrate_schrodinger", "mean_energy", "measure_period",
    "read_schedule_json", "read_table", "run_invariant_suite", "run_weak_rabi",
    "schedule_table", "schrodinger_rhs", "sigma_band", "sigma_q",
    "spinor_from_hds", "spinor_mean_energy_series", "state_energies",
    "state_energies_from_phases", "state_sigmas", "theta_advance_check",
    "trajectory_table", "variance_expectation_closed_form",
    "variance_expectation_matrix_route", "variance_matrix", "write_table",
    "write_schedule_json", "zeno_jump_schedule",
]
