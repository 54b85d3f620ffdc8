"""FID detection and spectra.

The receiver forms ``s = N * sum_p w_p (<S_x^p> - i <S_y^p>)``. With the
precession sense of the dynamics (``H = -omega S_z`` turns ``S_x`` towards
``-S_y``), this puts a positive offset at a positive spectral frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .algebra import Axis, get_basis
from .dynamics import Trajectory
from .spinsys import SpinSystem

__all__ = ["Fid", "Spectrum", "SpectrumComparison", "acquire_fid", "spectrum", "compare_spectra"]


@dataclass(frozen=True, eq=False)
class Fid:
    dwell: float
    samples: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or len(samples) < 2:
            raise ValueError("an FID needs at least two samples")
        if not self.dwell > 0:
            raise ValueError(f"dwell must be positive, got {self.dwell}")
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dwell


@dataclass(frozen=True, eq=False)
class Spectrum:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    peaks: list = field(default_factory=list)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    @property
    def bin_width(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])


def acquire_fid(traj: Trajectory, sys: SpinSystem, weights=None, *, grid_rtol=1e-9) -> Fid:
    """Quadrature-detected FID from the acquisition snapshots of ``traj``.

    ``weights`` defaults to the gyromagnetic ratios; the sample scale is the
    molecule count ``N``.
    """
    if traj.n != sys.n:
        raise ValueError("trajectory and spin system sizes differ")
    acq = traj.acquisition()
    times = acq.times
    if len(times) < 2:
        raise ValueError("need at least two acquisition snapshots")
    steps = np.diff(times)
    dwell = float((times[-1] - times[0]) / (len(times) - 1))
    if np.max(np.abs(steps - dwell)) > grid_rtol * dwell:
        raise ValueError("acquisition snapshots are not on a uniform grid")
    w = sys.gamma if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (sys.n,):
        raise ValueError(f"need {sys.n} receiver weights, got shape {w.shape}")
    basis = get_basis(sys.n)
    ix = [basis.index_of((p + 1,), (Axis.X,)) for p in range(sys.n)]
    iy = [basis.index_of((p + 1,), (Axis.Y,)) for p in range(sys.n)]
    s = acq.values[:, ix] @ w - 1j * (acq.values[:, iy] @ w)
    return Fid(dwell, sys.N * s, scale=sys.N)


def spectrum(fid: Fid, line_broadening_hz: float = 0.0, zero_fill: int | None = None,
             threshold: float = 0.01) -> Spectrum:
    """Apodize, zero-fill and Fourier transform an FID; pick peaks.

    Parameters
    ----------
    line_broadening_hz : float
        Exponential apodization ``exp(-pi lb t)``.
    zero_fill : int, optional
        Power of two, at least the number of samples. Defaults to the
        smallest such power.
    threshold : float
        Peaks are local maxima of the magnitude above ``threshold * max``.
    """
    npts = len(fid.samples)
    if zero_fill is None:
        zero_fill = 1 << (npts - 1).bit_length()
    if zero_fill < npts or zero_fill & (zero_fill - 1):
        raise ValueError(f"zero_fill must be a power of two >= {npts}, got {zero_fill}")
    if line_broadening_hz < 0:
        raise ValueError("line broadening must be >= 0")
    x = np.zeros(zero_fill, dtype=complex)
    x[:npts] = fid.samples * np.exp(-np.pi * line_broadening_hz * fid.times)
    amps = np.fft.fftshift(np.fft.fft(x))
    freqs = np.fft.fftshift(np.fft.fftfreq(zero_fill, fid.dwell))
    mag = np.abs(amps)
    peaks = []
    top = mag.max()
    if top > 0:
        # the DFT is periodic, so wrap one bin on each side to catch edge maxima
        ring = np.concatenate([mag[-1:], mag, mag[:1]])
        idx, _ = scipy.signal.find_peaks(ring, height=threshold * top)
        idx = np.sort((idx - 1) % zero_fill)
        peaks = [(float(freqs[i]), float(mag[i])) for i in idx]
    return Spectrum(freqs, amps, peaks)


@dataclass
class SpectrumComparison:
    pairs: list  # (freq_a, freq_b, freq_delta, magnitude_delta)
    unmatched_a: list
    unmatched_b: list
    max_amplitude_deviation: float
    relative_amplitude_deviation: float

    @property
    def all_matched(self) -> bool:
        return not self.unmatched_a and not self.unmatched_b


def compare_spectra(a: Spectrum, b: Spectrum, max_distance_hz: float | None = None) -> SpectrumComparison:
    """Greedy nearest-frequency pairing of peaks plus pointwise amplitude deviation."""
    if a.frequencies.shape != b.frequencies.shape or not np.allclose(
        a.frequencies, b.frequencies, rtol=0, atol=1e-9 * abs(a.bin_width)
    ):
        raise ValueError("spectra are on different frequency grids")
    cands = sorted(
        (abs(fa - fb), ia, ib)
        for ia, (fa, _) in enumerate(a.peaks)
        for ib, (fb, _) in enumerate(b.peaks)
        if max_distance_hz is None or abs(fa - fb) <= max_distance_hz
    )
    used_a, used_b, pairs = set(), set(), []
    for _, ia, ib in cands:
        if ia in used_a or ib in used_b:
            continue
        used_a.add(ia)
        used_b.add(ib)
        (fa, ma), (fb, mb) = a.peaks[ia], b.peaks[ib]
        pairs.append((fa, fb, fb - fa, mb - ma))
    pairs.sort()
    dev = float(np.max(np.abs(a.amplitudes - b.amplitudes)))
    top = float(np.max(np.abs(a.amplitudes)))
    return SpectrumComparison(
        pairs=pairs,
        unmatched_a=[p for i, p in enumerate(a.peaks) if i not in used_a],
        unmatched_b=[p for i, p in enumerate(b.peaks) if i not in used_b],
        max_amplitude_deviation=dev,
        relative_amplitude_deviation=dev / top if top > 0 else dev,
    )
