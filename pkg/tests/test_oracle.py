import math

import numpy as np
import pytest

from driven_qubit import (DriveSpec, HdsState, IntegrationStats, ModelParams,
                          SpinorState, SpinorTrajectory, Trajectory,
                          compare_trajectories, hamiltonian_value,
                          hds_from_spinor, integrate_hds,
                          integrate_schrodinger, schrodinger_rhs,
                          spinor_from_hds, spinor_mean_energy_series)

TWO_PI = 2.0 * math.pi
INV_SQRT2 = 1.0 / math.sqrt(2.0)


class TestRhs:
    def test_bare_upper_component(self):
        da, db = schrodinger_rhs(SpinorState(1.0, 0.0), DriveSpec.zero(), 0.0)
        assert da == pytest.approx(0.0)
        assert db == pytest.approx(-0.5j)

    def test_plus_eigenstate(self):
        p = SpinorState(INV_SQRT2, INV_SQRT2)
        da, db = schrodinger_rhs(p, DriveSpec.zero(), 0.0)
        assert da == pytest.approx(-0.5j * p.psi_a)
        assert db == pytest.approx(-0.5j * p.psi_b)

    def test_minus_eigenstate(self):
        p = SpinorState(INV_SQRT2, -INV_SQRT2)
        da, db = schrodinger_rhs(p, DriveSpec.zero(), 0.0)
        assert da == pytest.approx(+0.5j * p.psi_a)
        assert db == pytest.approx(+0.5j * p.psi_b)


class TestIntegration:
    def test_eigenstate_phase_return(self):
        p0 = SpinorState(INV_SQRT2, INV_SQRT2)
        traj = integrate_schrodinger(p0, DriveSpec.zero(), (0.0, 2 * TWO_PI))
        assert abs(traj.psi_a[-1] - p0.psi_a) < 1e-8
        assert abs(traj.psi_b[-1] - p0.psi_b) < 1e-8

    def test_larmor_sign_flip_and_return(self):
        traj = integrate_schrodinger(SpinorState(1.0, 0.0), DriveSpec.zero(),
                                     (0.0, 2 * TWO_PI))
        i_half = int(np.argmin(np.abs(traj.taus - TWO_PI)))
        assert abs(traj.psi_a[i_half] + 1.0) < 1e-8
        assert abs(traj.psi_b[i_half]) < 1e-8
        assert abs(traj.psi_a[-1] - 1.0) < 1e-8
        assert abs(traj.psi_b[-1]) < 1e-8

    def test_larmor_closed_form(self):
        traj = integrate_schrodinger(SpinorState(1.0, 0.0), DriveSpec.zero(),
                                     (0.0, 10.0))
        expect_a = np.cos(traj.taus / 2)
        expect_b = -1j * np.sin(traj.taus / 2)
        assert np.max(np.abs(traj.psi_a - expect_a)) < 1e-8
        assert np.max(np.abs(traj.psi_b - expect_b)) < 1e-8

    def test_norm_drift_small(self):
        traj = integrate_schrodinger(SpinorState(1.0, 0.0), DriveSpec.zero(),
                                     (0.0, 2000.0))
        assert traj.integ_stats.max_drift <= 1e-9

    def test_unnormalized_initial_rejected(self):
        with pytest.raises(ValueError):
            integrate_schrodinger(SpinorState(1.0, 1.0), DriveSpec.zero(),
                                  (0.0, 1.0))


class TestMeanEnergySeries:
    def test_matches_canonical_value(self):
        s = HdsState(0.3, 0.7, 0.4)
        traj = integrate_schrodinger(spinor_from_hds(s),
                                     DriveSpec.constant(0.5), (0.0, 20.0))
        series = spinor_mean_energy_series(traj)
        assert np.max(np.abs(series - hamiltonian_value(0.3, 0.7, 0.5))) < 1e-9


def _empty_pair():
    stats = IntegrationStats(0, 0, 0.0)
    params = ModelParams()
    drive = DriveSpec.zero()
    empty = np.empty(0)
    hds = Trajectory(params, drive, empty, empty, empty, empty, stats)
    sp = SpinorTrajectory(params, drive, empty, empty.astype(complex),
                          empty.astype(complex), stats)
    return hds, sp


class TestCompare:
    def test_zero_length_span(self):
        report = compare_trajectories(*_empty_pair())
        assert report.max_abs_alpha_diff == 0.0
        assert report.max_energy_diff == 0.0

    def test_grid_mismatch_rejected(self):
        s = HdsState(0.2, 0.1, 0.0)
        hds = integrate_hds(s, DriveSpec.zero(), (0.0, 10.0))
        sp = integrate_schrodinger(spinor_from_hds(s), DriveSpec.zero(),
                                   (0.0, 12.0))
        with pytest.raises(ValueError):
            compare_trajectories(hds, sp)

    @pytest.mark.parametrize("drive", [DriveSpec.zero(),
                                       DriveSpec.constant(0.5),
                                       DriveSpec.sinusoidal(8e-3)])
    def test_oracle_agreement(self, drive):
        s = HdsState(0.3, 0.9, 0.1)
        hds = integrate_hds(s, drive, (0.0, 200.0))
        sp = integrate_schrodinger(spinor_from_hds(s), drive, (0.0, 200.0))
        report = compare_trajectories(hds, sp)
        assert report.max_abs_alpha_diff <= 1e-6
        assert report.max_abs_delta_diff <= 1e-6
        assert report.max_abs_theta_diff <= 1e-6
        assert report.max_energy_diff <= 1e-6

    def test_free_orbit_energy_identity(self):
        s = HdsState(0.3, 0.0, 0.0)
        hds = integrate_hds(s, DriveSpec.zero(), (0.0, 100.0))
        sp = integrate_schrodinger(spinor_from_hds(s), DriveSpec.zero(),
                                   (0.0, 100.0))
        report = compare_trajectories(hds, sp)
        assert report.max_energy_diff <= 1e-9

    def test_mapped_energy_link(self, rng):
        # <H> from the amplitudes equals H of the mapped canonical state
        for _ in range(200):
            s = HdsState(rng.uniform(-0.99, 0.99), rng.uniform(0, TWO_PI),
                         rng.uniform(0, TWO_PI))
            p = spinor_from_hds(s)
            e = rng.uniform(-1, 1)
            mapped, _ = hds_from_spinor(p)
            from driven_qubit import mean_energy
            assert mean_energy(p, e) == pytest.approx(
                hamiltonian_value(mapped.alpha, mapped.delta, e), abs=1e-12)
