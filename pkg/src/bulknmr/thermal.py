"""Thermal-equilibrium initial states.

The bulk expectation of a collective operator in the thermal state is ``N``
times the single-molecule value, so everything here is per molecule and the
factor ``N`` is applied only when forming signals.

Exact mode diagonalizes the ``2**n``-dimensional single-molecule
Hamiltonian. Basis elements are handled as Pauli strings
``P = i**ny X**x Z**z`` (bit masks ``x``, ``z``; nucleus 1 is the most
significant bit), which gives every trace ``Tr(rho P)`` at once from a
Walsh-Hadamard transform of the diagonals ``rho[r, r ^ x]``.
"""

from __future__ import annotations

import enum

import numpy as np
import scipy.linalg

from .algebra import get_basis
from .dynamics import StateVector
from .spinsys import FieldSpec, SpinSystem, hamiltonian_coeffs

__all__ = ["THERMAL_MAX_N", "ThermalMode", "thermal_state", "pauli_masks", "hamiltonian_dense"]

THERMAL_MAX_N = 10


class ThermalMode(enum.Enum):
    EXACT = "exact"
    HIGH_TEMPERATURE = "high_temperature"


def pauli_masks(n: int):
    """Per basis element: x-mask, z-mask and number of y factors."""
    words = get_basis(n).words
    bits = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    xmask = ((words == 1) | (words == 2)).astype(np.int64) @ bits
    zmask = ((words == 3) | (words == 2)).astype(np.int64) @ bits
    ny = np.count_nonzero(words == 2, axis=1)
    return xmask, zmask, ny


def _parity(a):
    a = np.asarray(a, dtype=np.int64)
    p = np.zeros_like(a)
    while np.any(a):
        p ^= a & 1
        a = a >> 1
    return p


def hamiltonian_dense(sys: SpinSystem, field: FieldSpec | None = None) -> np.ndarray:
    """Single-molecule Hamiltonian as a dense complex matrix."""
    n = sys.n
    h = hamiltonian_coeffs(sys, field)
    basis = get_basis(n)
    xmask, zmask, ny = pauli_masks(n)
    dim = 2**n
    cols = np.arange(dim)
    H = np.zeros((dim, dim), dtype=complex)
    for j in np.flatnonzero(h):
        sign = 1 - 2 * _parity(cols & zmask[j])
        # P[c ^ x, c] = i**ny (-1)**popcount(c & z); B = P / 2**rank
        H[cols ^ xmask[j], cols] += h[j] * (1j ** ny[j]) * sign / 2.0 ** basis.ranks[j]
    return H


def _exact(sys: SpinSystem) -> np.ndarray:
    n = sys.n
    H = hamiltonian_dense(sys)
    w, U = np.linalg.eigh(H)
    p = np.exp(-sys.beta * (w - w.min()))
    p /= p.sum()
    rho = (U * p) @ U.conj().T
    dim = 2**n
    r = np.arange(dim)
    D = rho[r[None, :], r[None, :] ^ r[:, None]]  # D[x, r] = rho[r, r ^ x]
    T = D @ scipy.linalg.hadamard(dim)  # T[x, z] = Tr(rho X^x Z^z)
    xmask, zmask, ny = pauli_masks(n)
    traces = (1j**ny) * T[xmask, zmask]
    return np.real(traces) / 2.0 ** get_basis(n).ranks


def thermal_state(sys: SpinSystem, mode=ThermalMode.EXACT) -> StateVector:
    """Per-molecule thermal expectation values of every basis element.

    Parameters
    ----------
    sys : SpinSystem
        Uses ``sys.beta`` and the longitudinal-omega Hamiltonian.
    mode : ThermalMode
        ``EXACT`` evaluates ``Tr[B exp(-beta H)] / Tr[exp(-beta H)]``;
        ``HIGH_TEMPERATURE`` keeps the first order in beta,
        ``-beta Tr[B H] / 2**n``.
    """
    mode = ThermalMode(mode)
    if not sys.beta >= 0:
        raise ValueError(f"beta must be >= 0, got {sys.beta}")
    if mode is ThermalMode.HIGH_TEMPERATURE:
        h = hamiltonian_coeffs(sys)
        # Tr[B_j B_k] = delta_jk 2**n / 4**rank_j
        return StateVector(sys.n, -sys.beta * h / 4.0 ** get_basis(sys.n).ranks)
    if sys.n > THERMAL_MAX_N:
        raise ValueError(f"exact thermal state limited to n <= {THERMAL_MAX_N}, got n={sys.n}")
    if sys.beta == 0:
        return StateVector.zeros(sys.n)
    return StateVector(sys.n, _exact(sys))
