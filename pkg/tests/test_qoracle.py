import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bulknmr import SpinSystem, StateVector, apply_rotation, enumerate_basis, thermal_state
from bulknmr import qoracle
from bulknmr.algebra import parse_operator

from _util import random_rho, random_state, random_system


def test_realize_examples():
    np.testing.assert_array_equal(qoracle.realize(parse_operator("S[1z]", 1)), np.diag([0.5, -0.5]))
    np.testing.assert_array_equal(qoracle.realize(parse_operator("S[1x]", 1)), [[0, 0.5], [0.5, 0]])
    np.testing.assert_array_equal(qoracle.realize(parse_operator("C[1z,2z]", 2)), np.diag([1, -1, -1, 1]) / 4)


def test_realize_nucleus_one_most_significant():
    # S_z of nucleus 1 splits the first half of the states from the second
    np.testing.assert_array_equal(np.diag(qoracle.realize(parse_operator("S[1z]", 2))).real, [0.5, 0.5, -0.5, -0.5])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_realize_invariants(n):
    for o in enumerate_basis(n):
        M = qoracle.realize(o)
        np.testing.assert_array_equal(M, M.conj().T)
        assert np.trace(M) == 0
        assert np.sum(np.abs(M) ** 2) == pytest.approx(2**n / 4**o.rank)


def test_realize_ceiling(monkeypatch):
    monkeypatch.setattr(qoracle, "ORACLE_MAX_N", 2)
    with pytest.raises(ValueError, match="oracle ceiling exceeded"):
        qoracle.realize(parse_operator("S[1x]", 3))


def test_maximally_mixed_is_zero():
    assert not qoracle.expectations(qoracle.DensityMatrix(3, np.eye(8) / 8)).values.any()
    np.testing.assert_allclose(qoracle.state_to_rho(StateVector.zeros(2)).rho, np.eye(4) / 4)


def test_pure_up_up():
    rho = np.zeros((4, 4))
    rho[0, 0] = 1
    v = qoracle.expectations(qoracle.DensityMatrix(2, rho))
    assert v["S[1z]"] == v["S[2z]"] == 0.5
    assert v["C[1z,2z]"] == 0.25
    basis = enumerate_basis(2)
    others = [j for j, o in enumerate(basis) if o.name not in ("S[1z]", "S[2z]", "C[1z,2z]")]
    assert not v.values[others].any()


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_round_trip(n, seed):
    rho = random_rho(np.random.default_rng(seed), n)
    back = qoracle.state_to_rho(qoracle.expectations(rho))
    np.testing.assert_allclose(back.rho, rho.rho, atol=1e-12)
    v = random_state(np.random.default_rng(seed + 1), n)
    np.testing.assert_allclose(qoracle.expectations(qoracle.state_to_rho(v)).values, v.values, atol=1e-12)


def test_thermal_round_trip():
    sys = random_system(np.random.default_rng(0), 3, beta=2e-3)
    rho = qoracle.state_to_rho(thermal_state(sys))
    np.testing.assert_allclose(rho.rho, qoracle.thermal_rho(sys).rho, atol=1e-12)


def test_unphysical_state_flagged():
    v = StateVector.from_mapping(1, {"S[1z]": 5.0})
    dm = qoracle.state_to_rho(v)
    assert dm.min_eigenvalue() < 0
    assert dm.check() == ["positive"]
    assert random_rho(np.random.default_rng(1), 2).check() == []


def test_evolve_rho_zero_time_and_period():
    rng = np.random.default_rng(3)
    rho = random_rho(rng, 2)
    sys = random_system(rng, 2)
    np.testing.assert_allclose(qoracle.evolve_rho(rho, sys, None, 0.0).rho, rho.rho, atol=1e-15)
    w = 2 * np.pi * 40
    one = SpinSystem(omega=[w])
    dm = qoracle.state_to_rho(StateVector(1, [0.5, 0, 0]))
    after = qoracle.expectations(qoracle.evolve_rho(dm, one, None, 2 * np.pi / w))
    np.testing.assert_allclose(after.values, [0.5, 0, 0], atol=1e-12)


def test_thermal_rho_is_stationary():
    sys = random_system(np.random.default_rng(4), 3, beta=1e-3)
    rho = qoracle.thermal_rho(sys)
    np.testing.assert_allclose(qoracle.evolve_rho(rho, sys, None, 0.41).rho, rho.rho, atol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_unitarity(n):
    rng = np.random.default_rng(n)
    rho = random_rho(rng, n, rank=2)
    sys = random_system(rng, n)
    out = qoracle.evolve_rho(rho, sys, None, 1.3)
    assert np.trace(out.rho).real == pytest.approx(1.0, abs=1e-12)
    assert out.purity == pytest.approx(rho.purity, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.sampled_from("xyz"), st.floats(-7, 7))
def test_rotation_matches_unitary(n, seed, axis, angle):
    rng = np.random.default_rng(seed)
    rho = random_rho(rng, n)
    targets = tuple(int(p) for p in np.flatnonzero(rng.random(n) < 0.6) + 1) or (n,)
    got = apply_rotation(qoracle.expectations(rho), targets, axis, angle)
    want = qoracle.expectations(qoracle.rotate_rho(rho, targets, axis, angle))
    np.testing.assert_allclose(got.values, want.values, atol=1e-10)
