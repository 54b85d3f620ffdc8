import numpy as np
import pytest

from bulknmr import SpinSystem, ThermalMode, evolve_constant, generator, get_basis, thermal_state
from bulknmr import qoracle
from bulknmr.thermal import hamiltonian_dense

from _util import random_system


def test_zero_beta_is_zero_state():
    sys = SpinSystem(omega=[1.0, 2.0], J=[[0, 1], [1, 0]], beta=0.0)
    for mode in ThermalMode:
        assert not thermal_state(sys, mode).values.any()


@pytest.mark.parametrize("bw", [1e-6, 0.3, 2.0, 40.0])
def test_single_spin_tanh(bw):
    w = 2 * np.pi * 100
    v = thermal_state(SpinSystem(omega=[w], beta=bw / w))
    assert v["S[1z]"] == pytest.approx(0.5 * np.tanh(bw / 2), abs=1e-12)
    assert v["S[1x]"] == 0 and v["S[1y]"] == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exact_matches_oracle(n):
    rng = np.random.default_rng(n)
    sys = random_system(rng, n, beta=rng.uniform(1e-4, 1e-3))
    want = qoracle.expectations(qoracle.thermal_rho(sys)).values
    np.testing.assert_allclose(thermal_state(sys).values, want, atol=1e-12)


def test_dense_hamiltonian_matches_kronecker():
    rng = np.random.default_rng(1)
    sys = random_system(rng, 3)
    np.testing.assert_allclose(hamiltonian_dense(sys), qoracle.hamiltonian_matrix(sys), atol=1e-9)


def test_z_diagonal_hamiltonian_has_no_transverse_slots():
    sys = SpinSystem(omega=[3e3, -1e3, 2e3], beta=3e-4)
    v = thermal_state(sys)
    basis = get_basis(3)
    has_xy = ((basis.words == 1) | (basis.words == 2)).any(axis=1)
    assert not v.values[has_xy].any()
    assert v.values[~has_xy].any()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_stationary(n):
    rng = np.random.default_rng(10 + n)
    sys = random_system(rng, n, beta=1e-3)
    v = thermal_state(sys)
    out = evolve_constant(v, generator(sys), 0.73)
    np.testing.assert_allclose(out.values, v.values, atol=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_high_temperature_error_is_quadratic(n):
    rng = np.random.default_rng(20 + n)
    sys = random_system(rng, n)
    scale = np.abs(np.concatenate([sys.omega, sys.J.ravel()])).max()

    def err(beta):
        s = SpinSystem(omega=sys.omega, J=sys.J, beta=beta)
        hi = thermal_state(s, ThermalMode.HIGH_TEMPERATURE).values
        return np.abs(hi - thermal_state(s).values).max()

    beta = 0.02 / scale
    ratio = err(beta) / err(beta / 2)
    assert 4 * 0.8 <= ratio <= 4 * 1.2


def test_high_temperature_first_order():
    sys = SpinSystem(omega=[200.0], beta=1e-6)
    v = thermal_state(sys, ThermalMode.HIGH_TEMPERATURE)
    assert v["S[1z]"] == pytest.approx(200.0 * 1e-6 / 4)


def test_exact_ceiling(monkeypatch):
    import bulknmr.thermal

    monkeypatch.setattr(bulknmr.thermal, "THERMAL_MAX_N", 2)
    sys = SpinSystem(omega=np.ones(3), beta=1.0)
    with pytest.raises(ValueError):
        thermal_state(sys)
    assert thermal_state(sys, ThermalMode.HIGH_TEMPERATURE).values.shape == (63,)
