import numpy as np
import pytest

from driven_qubit import DriveSpec, HdsState, integrate_hds, run_weak_rabi


@pytest.fixture(scope="session")
def weak_run():
    """One full Rabi period at the reference amplitude, shared across tests."""
    return run_weak_rabi(8e-3, 1.0)


@pytest.fixture(scope="session")
def warm_integrator():
    """Trigger the compiled-kernel load before anything timing-sensitive."""
    from driven_qubit import SpinorState, integrate_schrodinger

    integrate_hds(HdsState(0.1, 0.0, 0.0), DriveSpec.zero(), (0.0, 2.0))
    integrate_schrodinger(SpinorState(1.0, 0.0), DriveSpec.zero(), (0.0, 2.0))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
