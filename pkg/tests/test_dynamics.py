import math

import numpy as np
import pytest

from driven_qubit import (DriveSpec, HdsState, IntegrationStats,
                          NoOscillationError, PoleProximityError, SamplingSpec,
                          Trajectory, hamiltonian_value, hds_rhs,
                          integrate_hds, measure_period, spinor_from_hds,
                          theta_advance_check)

TWO_PI = 2.0 * math.pi


class TestHamiltonianValue:
    def test_upper_eigenvalue(self):
        assert hamiltonian_value(0.0, 0.0, 0.0) == pytest.approx(1.0)

    def test_lower_eigenvalue(self):
        assert hamiltonian_value(0.0, math.pi, 0.0) == pytest.approx(-1.0)

    def test_driven_point(self):
        assert hamiltonian_value(0.6, 0.0, 0.5) == pytest.approx(1.1)

    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            hamiltonian_value(1.2, 0.0, 0.0)


class TestRhs:
    def test_fixed_point(self):
        d = hds_rhs(HdsState(0.0, 0.0, 0.0), DriveSpec.zero(), 0.0)
        assert (d.d_alpha, d.d_delta, d.d_theta) == (0.0, 0.0, -0.5)

    def test_quarter_phase(self):
        d = hds_rhs(HdsState(0.0, math.pi / 2, 0.0), DriveSpec.zero(), 0.0)
        assert d.d_alpha == pytest.approx(1.0)
        assert d.d_delta == pytest.approx(0.0, abs=1e-15)
        assert d.d_theta == pytest.approx(0.0, abs=1e-15)

    def test_constant_drive(self):
        d = hds_rhs(HdsState(0.0, 0.0, 0.0), DriveSpec.constant(0.5), 3.0)
        assert d.d_alpha == pytest.approx(0.0)
        assert d.d_delta == pytest.approx(0.5)
        assert d.d_theta == pytest.approx(-0.75)

    def test_pole_proximity_raises(self):
        with pytest.raises(PoleProximityError):
            hds_rhs(HdsState(1.0 - 1e-13, 0.0, 0.0), DriveSpec.zero(), 0.0)


class TestIntegration:
    def test_free_orbit_period(self):
        traj = integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, 40.0))
        m = measure_period(traj)
        assert m.period == pytest.approx(TWO_PI, abs=1e-6)
        assert m.sense == 1

    def test_constant_drive_frequency(self):
        traj = integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.constant(0.5),
                             (0.0, 40.0))
        m = measure_period(traj)
        assert TWO_PI / m.period == pytest.approx(math.sqrt(1.25), abs=1e-6)

    def test_constant_drive_conservation(self):
        traj = integrate_hds(HdsState(0.2, 0.7, 0.0), DriveSpec.constant(0.5),
                             (0.0, 200.0))
        assert traj.integ_stats.max_drift <= 1e-9

    def test_negative_hamiltonian_sense(self):
        traj = integrate_hds(HdsState(-0.1, math.pi, 0.0), DriveSpec.zero(),
                             (0.0, 40.0))
        m = measure_period(traj)
        assert m.period == pytest.approx(TWO_PI, abs=1e-6)
        assert m.sense == -1

    def test_rotating_orbit_period(self):
        # this orbit encircles the north pole, so delta winds monotonically
        traj = integrate_hds(HdsState(0.9, math.pi / 2, 0.0),
                             DriveSpec.constant(1.0), (0.0, 60.0))
        m = measure_period(traj, observable="delta")
        assert m.period == pytest.approx(TWO_PI / math.sqrt(2.0), abs=1e-6)
        assert m.sense == 1

    def test_zero_span_rejected(self):
        with pytest.raises(ValueError):
            integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(), (1.0, 1.0))

    def test_initial_pole_rejected(self):
        with pytest.raises(PoleProximityError):
            integrate_hds(HdsState(1.0, 0.0, 0.0), DriveSpec.zero(), (0.0, 1.0))

    def test_sampling_density(self):
        traj = integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, 10.0), sampling=SamplingSpec(128))
        stride = traj.taus[1] - traj.taus[0]
        assert stride <= TWO_PI / 128

    def test_reversibility(self):
        start = HdsState(0.35, 1.1, 0.2)
        fwd = integrate_hds(start, DriveSpec.constant(0.5), (0.0, 100.0))
        end = fwd.state(len(fwd) - 1)
        back = integrate_hds(end, DriveSpec.constant(0.5), (100.0, 0.0))
        got = back.state(len(back) - 1)
        assert got.alpha == pytest.approx(start.alpha, abs=1e-8)
        assert got.delta == pytest.approx(start.delta, abs=1e-8)
        assert got.theta_overall == pytest.approx(start.theta_overall, abs=1e-8)

    def test_rhs_matches_finite_differences(self):
        traj = integrate_hds(HdsState(0.3, 0.2, 0.0), DriveSpec.zero(),
                             (0.0, 30.0))
        h = traj.taus[1] - traj.taus[0]
        for i in range(1, len(traj) - 1, 13):
            der = hds_rhs(traj.state(i), traj.drive, traj.taus[i])
            fd = (traj.alphas[i + 1] - traj.alphas[i - 1]) / (2 * h)
            assert fd == pytest.approx(der.d_alpha, abs=h * h)


class TestMeasurePeriod:
    def test_too_short_raises(self):
        traj = integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, 3.0))
        with pytest.raises(NoOscillationError):
            measure_period(traj)

    def test_unknown_observable(self):
        traj = integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, 40.0))
        with pytest.raises(ValueError):
            measure_period(traj, observable="H")


class TestThetaAdvance:
    def test_fixed_point_half_turn(self):
        traj = integrate_hds(HdsState(0.0, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, TWO_PI))
        assert theta_advance_check(traj) == pytest.approx(-math.pi, abs=1e-8)

    def test_fixed_point_full_return(self):
        traj = integrate_hds(HdsState(0.0, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, 2 * TWO_PI))
        assert theta_advance_check(traj) == pytest.approx(-TWO_PI, abs=1e-8)

    def test_orbit_spinor_sign_flip(self):
        # after one orbit period the canonical point returns but the
        # spinor comes back with the opposite sign
        start = HdsState(0.1, 0.0, 0.0)
        scan = integrate_hds(start, DriveSpec.zero(), (0.0, 40.0))
        period = measure_period(scan).period
        traj = integrate_hds(start, DriveSpec.zero(), (0.0, period))
        end = traj.state(len(traj) - 1)
        assert end.alpha == pytest.approx(start.alpha, abs=1e-6)
        p0 = spinor_from_hds(start)
        p1 = spinor_from_hds(end)
        assert abs(p1.psi_a + p0.psi_a) < 1e-6
        assert abs(p1.psi_b + p0.psi_b) < 1e-6


class TestTrajectory:
    def test_state_roundtrip(self):
        traj = integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(),
                             (0.0, 5.0))
        s = traj.state(0)
        assert s.alpha == pytest.approx(0.1)
        assert len(traj.states) == len(traj)

    def test_hamiltonian_series(self):
        traj = integrate_hds(HdsState(0.2, 0.3, 0.0), DriveSpec.constant(0.5),
                             (0.0, 5.0))
        h0 = hamiltonian_value(0.2, 0.3, 0.5)
        assert np.max(np.abs(traj.hamiltonian() - h0)) < 1e-9
