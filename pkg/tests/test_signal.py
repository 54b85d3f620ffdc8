import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bulknmr import Acquire, HardPulse, SpinSystem, acquire_fid, compare_spectra, run_sequence, spectrum, thermal_state
from bulknmr.dynamics import StateVector, Trajectory
from bulknmr.signal import Fid, Spectrum

from _util import random_state, random_system

DWELL = 1 / 1024


def fid_of(sys, points=256, dwell=DWELL, v0=None):
    v0 = thermal_state(sys) if v0 is None else v0
    traj = run_sequence(sys, [HardPulse(tuple(range(1, sys.n + 1)), "x", np.pi / 2), Acquire(dwell, points)], v0)
    return acquire_fid(traj, sys), traj


def test_zero_transverse_gives_zero_fid():
    traj = Trajectory(1, np.arange(8) * 0.01, np.tile([0.0, 0.0, 0.3], (8, 1)))
    fid = acquire_fid(traj, SpinSystem(omega=[1.0]))
    assert not fid.samples.any()
    spec = spectrum(fid)
    assert not spec.amplitudes.any() and spec.peaks == []


def test_single_spin_fid_is_exponential():
    w = 2 * np.pi * 60
    sys = SpinSystem(omega=[w], beta=1e-3)
    fid, _ = fid_of(sys)
    t = fid.times
    ratio = fid.samples / np.exp(1j * w * t)
    # positive offsets rotate counterclockwise in the detected signal
    np.testing.assert_allclose(ratio, ratio[0], atol=1e-12)
    assert abs(ratio[0]) > 0


def test_doubling_molecules_doubles_fid():
    sys = random_system(np.random.default_rng(1), 2, beta=1e-4)
    big = SpinSystem(omega=sys.omega, J=sys.J, N=2 * sys.N, beta=sys.beta)
    a, _ = fid_of(sys)
    b, _ = fid_of(big)
    np.testing.assert_array_equal(b.samples, 2 * a.samples)


def test_linearity():
    rng = np.random.default_rng(2)
    sys = random_system(rng, 2)
    v1, v2 = random_state(rng, 2), random_state(rng, 2)
    _, t1 = fid_of(sys, v0=v1)
    _, t2 = fid_of(sys, v0=v2)
    summed = Trajectory(2, t1.times, t1.values + t2.values, t1.acquired)
    np.testing.assert_allclose(
        acquire_fid(summed, sys).samples, acquire_fid(t1, sys).samples + acquire_fid(t2, sys).samples, atol=1e-15
    )


def test_nonuniform_grid_rejected():
    traj = Trajectory(1, [0.0, 0.1, 0.3], np.zeros((3, 3)))
    with pytest.raises(ValueError):
        acquire_fid(traj, SpinSystem(omega=[1.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 20), st.sampled_from([None, 512, 2048]))
def test_parseval(seed, lb, zf):
    rng = np.random.default_rng(seed)
    samples = rng.normal(size=300) + 1j * rng.normal(size=300)
    fid = Fid(1e-3, samples)
    spec = spectrum(fid, lb, zf)
    x = samples * np.exp(-np.pi * lb * fid.times)
    m = len(spec.amplitudes)
    assert np.sum(np.abs(spec.amplitudes) ** 2) / m == pytest.approx(np.sum(np.abs(x) ** 2), rel=1e-9)
    assert spec.bin_width == pytest.approx(1 / (1e-3 * m))


@pytest.mark.parametrize("k", [-300, -12, 0, 100, 511])
def test_on_grid_exponential_single_peak(k):
    dwell, points = 1e-3, 1024
    f0 = k / (dwell * points)
    t = np.arange(points) * dwell
    spec = spectrum(Fid(dwell, np.exp(2j * np.pi * f0 * t)))
    assert len(spec.peaks) == 1
    assert abs(spec.peaks[0][0] - f0) <= spec.bin_width


@pytest.mark.parametrize("f0", [-499.7, -300.3, -12.5, 0.1, 100.0, 499.0])
def test_off_grid_exponential_strongest_peak(f0):
    # leakage sidelobes are legitimate local maxima; the strongest is the line
    dwell, points = 1e-3, 1000
    t = np.arange(points) * dwell
    spec = spectrum(Fid(dwell, np.exp(2j * np.pi * f0 * t)))
    freq, _ = max(spec.peaks, key=lambda p: p[1])
    assert abs(freq - f0) <= spec.bin_width


def test_weak_coupling_quartet():
    sys = SpinSystem.from_hz([200.0, -200.0], [[0, 10.0], [10.0, 0]], beta=1e-4)
    fid, _ = fid_of(sys, points=1024)
    spec = spectrum(fid)
    freqs = sorted(f for f, _ in spec.peaks)
    assert len(freqs) == 4
    for got, want in zip(freqs, [-205, -195, 195, 205]):
        assert abs(got - want) <= spec.bin_width


def test_bad_zero_fill():
    fid = Fid(1e-3, np.ones(100))
    with pytest.raises(ValueError):
        spectrum(fid, zero_fill=64)
    with pytest.raises(ValueError):
        spectrum(fid, zero_fill=200)
    with pytest.raises(ValueError):
        spectrum(fid, line_broadening_hz=-1)


def test_fid_validation():
    with pytest.raises(ValueError):
        Fid(1e-3, [1.0])
    with pytest.raises(ValueError):
        Fid(0.0, [1.0, 2.0])


def test_compare_identical_and_shifted():
    dwell, points = 1e-3, 1024
    t = np.arange(points) * dwell
    bw = 1 / (dwell * points)
    a = spectrum(Fid(dwell, np.exp(2j * np.pi * 40 * bw * t)))
    b = spectrum(Fid(dwell, np.exp(2j * np.pi * 41 * bw * t)))
    same = compare_spectra(a, a)
    assert same.all_matched and same.max_amplitude_deviation == 0
    assert all(p[2] == 0 and p[3] == 0 for p in same.pairs)
    shifted = compare_spectra(a, b)
    assert shifted.all_matched
    assert shifted.pairs[0][2] == pytest.approx(bw)


def test_compare_unmatched_and_grid_mismatch():
    f = np.linspace(-1, 1, 5)
    a = Spectrum(f, np.zeros(5, complex), [(0.0, 1.0)])
    b = Spectrum(f, np.zeros(5, complex), [(0.5, 1.0), (-1.0, 2.0)])
    report = compare_spectra(a, b, max_distance_hz=0.6)
    assert len(report.pairs) == 1 and report.unmatched_b == [(-1.0, 2.0)]
    with pytest.raises(ValueError):
        compare_spectra(a, Spectrum(f * 2, np.zeros(5, complex)))


def test_receiver_weights():
    sys = SpinSystem(omega=[1.0, 2.0], gamma=[1.0, 3.0])
    traj = Trajectory(2, [0.0, 1.0], np.tile(StateVector.from_mapping(2, {"S[1x]": 0.1, "S[2y]": 0.2}).values, (2, 1)))
    np.testing.assert_allclose(acquire_fid(traj, sys).samples, 0.1 - 0.6j)
    np.testing.assert_allclose(acquire_fid(traj, sys, [2.0, 0.0]).samples, 0.2)
