"""Dense single-molecule density-matrix simulator used as a reference.

Everything here works on explicit ``2**n x 2**n`` complex matrices built from
Kronecker products of ``sigma/2``; nucleus 1 is the most significant tensor
factor. Nothing in this module uses the symbolic structure constants, so it
can serve as an independent check on them and on the classical dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .algebra import Axis, ProductOperator, get_basis
from .dynamics import StateVector, Trajectory
from .spinsys import Acquire, Evolve, FieldSpec, HardPulse, SpinSystem, hamiltonian_coeffs

__all__ = [
    "ORACLE_MAX_N",
    "DensityMatrix",
    "realize",
    "hamiltonian_matrix",
    "thermal_rho",
    "evolve_rho",
    "rotate_rho",
    "expectations",
    "expectation_series",
    "state_to_rho",
    "run_sequence_rho",
]

ORACLE_MAX_N = 10

_PAULI_HALF = (
    np.eye(2, dtype=complex),
    np.array([[0, 0.5], [0.5, 0]], dtype=complex),
    np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
    np.array([[0.5, 0], [0, -0.5]], dtype=complex),
)


def _check_ceiling(n: int):
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle ceiling exceeded: n={n} > {ORACLE_MAX_N}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    rho: np.ndarray

    def __post_init__(self):
        _check_ceiling(self.n)
        if self.rho.shape != (2**self.n, 2**self.n):
            raise ValueError(f"rho must be {2**self.n}x{2**self.n}, got {self.rho.shape}")

    def check(self, herm_tol=1e-12, trace_tol=1e-12, psd_tol=-1e-10) -> list:
        """Names of violated invariants (hermiticity, unit trace, positivity)."""
        bad = []
        if np.max(np.abs(self.rho - self.rho.conj().T)) > herm_tol:
            bad.append("hermitian")
        if abs(np.trace(self.rho) - 1) > trace_tol:
            bad.append("trace")
        if self.min_eigenvalue() < psd_tol:
            bad.append("positive")
        return bad

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.rho, self.rho)))


def realize(op: ProductOperator) -> np.ndarray:
    """Kronecker-product matrix of ``op``: ``sigma/2`` on involved nuclei, identity elsewhere."""
    _check_ceiling(op.n)
    return reduce(np.kron, (_PAULI_HALF[a] for a in op.word))


def hamiltonian_matrix(sys: SpinSystem, field: FieldSpec | None = None) -> np.ndarray:
    h = hamiltonian_coeffs(sys, field)
    _check_ceiling(sys.n)
    basis = get_basis(sys.n)
    H = np.zeros((2**sys.n, 2**sys.n), dtype=complex)
    for j in np.flatnonzero(h):
        H += h[j] * realize(basis[j])
    return H


def _unitary(H: np.ndarray, t: float) -> np.ndarray:
    w, U = np.linalg.eigh(H)
    return (U * np.exp(-1j * w * t)) @ U.conj().T


def thermal_rho(sys: SpinSystem, field: FieldSpec | None = None) -> DensityMatrix:
    """``exp(-beta H) / Z`` for one molecule, via eigendecomposition."""
    H = hamiltonian_matrix(sys, field)
    w, U = np.linalg.eigh(H)
    p = np.exp(-sys.beta * (w - w.min()))
    p /= p.sum()
    return DensityMatrix(sys.n, (U * p) @ U.conj().T)


def evolve_rho(dm: DensityMatrix, sys: SpinSystem, field: FieldSpec | None, t: float) -> DensityMatrix:
    """``U rho U^dagger`` with ``U = exp(-i H t)``."""
    if sys.n != dm.n:
        raise ValueError("density matrix and spin system sizes differ")
    U = _unitary(hamiltonian_matrix(sys, field), t)
    return DensityMatrix(dm.n, U @ dm.rho @ U.conj().T)


def expectation_series(dm: DensityMatrix, sys: SpinSystem, field: FieldSpec | None, times) -> np.ndarray:
    """Expectation vectors of ``U(t) rho U(t)^dagger`` for each time, one eigendecomposition."""
    w, U = np.linalg.eigh(hamiltonian_matrix(sys, field))
    rho_e = U.conj().T @ dm.rho @ U
    out = []
    for t in times:
        ph = np.exp(-1j * w * t)
        rho_t = U @ (ph[:, None] * rho_e * ph.conj()[None, :]) @ U.conj().T
        out.append(expectations(DensityMatrix(dm.n, rho_t)).values)
    return np.array(out)


def rotation_unitary(n: int, targets, axis, angle: float) -> np.ndarray:
    """Product of single-spin rotations ``exp(-i angle S_axis)`` on ``targets``."""
    _check_ceiling(n)
    axis = Axis.parse(axis)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    # exp(-i angle sigma/2) = cos(angle/2) I - i sin(angle/2) sigma
    single = c * np.eye(2) - 2j * s * _PAULI_HALF[axis]
    factors = [single if p + 1 in set(targets) else np.eye(2) for p in range(n)]
    return reduce(np.kron, factors)


def rotate_rho(dm: DensityMatrix, targets, axis, angle: float) -> DensityMatrix:
    for t in targets:
        if not 1 <= t <= dm.n:
            raise ValueError(f"target out of range: {t}")
    U = rotation_unitary(dm.n, targets, axis, angle)
    return DensityMatrix(dm.n, U @ dm.rho @ U.conj().T)


def _site_transform(T: np.ndarray, n: int, X: np.ndarray) -> np.ndarray:
    """Apply the same small linear map on every site index of a rank-``n`` tensor."""
    for p in range(n):
        X = np.moveaxis(np.tensordot(T, X, axes=([1], [p])), 0, p)
    return X


# Tr(rho sigma_a / 2) per site: maps a (row, col) pair to the four components.
_TO_COMPONENTS = np.array([m.T.reshape(-1) for m in _PAULI_HALF])
# Inverse per site: identity slot -> I/2, axis slot -> sigma_a, which reassembles
# rho = I/2^n + sum_j v_j 4^rank B_j / 2^n from comps (comps[0] = 1).
_FROM_COMPONENTS = np.array([m.reshape(-1) for m in _PAULI_HALF]).T * np.array([0.5, 2.0, 2.0, 2.0])


def _pair_tensor(rho: np.ndarray, n: int) -> np.ndarray:
    """Reshape ``rho`` so that axis ``p`` indexes the (row_p, col_p) pair of nucleus ``p``."""
    X = rho.reshape((2,) * (2 * n))
    order = [ax for p in range(n) for ax in (p, n + p)]
    return X.transpose(order).reshape((4,) * n)


def _unpair_tensor(X: np.ndarray, n: int) -> np.ndarray:
    X = X.reshape((2,) * (2 * n))
    inverse = [2 * p for p in range(n)] + [2 * p + 1 for p in range(n)]
    return X.transpose(inverse).reshape(2**n, 2**n)


def expectations(dm: DensityMatrix) -> StateVector:
    """``v_j = Tr(rho B_j)`` for every basis element, by per-site contraction."""
    n = dm.n
    comps = _site_transform(_TO_COMPONENTS, n, _pair_tensor(dm.rho, n))
    basis = get_basis(n)
    vals = comps.reshape(-1)[basis.codes]
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-12:
        raise ValueError("density matrix is not Hermitian: complex expectation values")
    return StateVector(n, vals.real.copy())


def state_to_rho(state: StateVector) -> DensityMatrix:
    """Invert :func:`expectations` using completeness of the product-operator basis.

    ``rho = I/2^n + sum_j v_j B_j 4^rank_j / 2^n``. Positivity is not
    guaranteed for arbitrary input; check ``min_eigenvalue()``.
    """
    n = state.n
    _check_ceiling(n)
    basis = get_basis(n)
    comps = np.zeros(4**n, dtype=complex)
    comps[0] = 1.0
    comps[basis.codes] = state.values
    X = _site_transform(_FROM_COMPONENTS, n, comps.reshape((4,) * n))
    return DensityMatrix(n, _unpair_tensor(X, n))


def run_sequence_rho(sys: SpinSystem, seq, rho0: DensityMatrix, return_final: bool = False):
    """Density-matrix counterpart of :func:`bulknmr.dynamics.run_sequence`.

    Snapshot semantics match the classical runner: a snapshot at time ``t``
    holds the state after all instantaneous events at ``t``. With
    ``return_final`` the final DensityMatrix is returned alongside.
    """
    t = 0.0
    times, states, acquired = [0.0], [expectations(rho0).values], [False]
    dm = rho0

    def record(time, is_acq):
        v = expectations(dm).values
        if time == times[-1]:
            states[-1] = v
            acquired[-1] = acquired[-1] or is_acq
        else:
            times.append(time)
            states.append(v)
            acquired.append(is_acq)

    for ev in seq:
        if isinstance(ev, Evolve):
            dm = evolve_rho(dm, sys, ev.field, ev.duration)
            t += ev.duration
            record(t, False)
        elif isinstance(ev, HardPulse):
            dm = rotate_rho(dm, ev.targets, ev.axis, ev.angle)
            record(t, False)
        elif isinstance(ev, Acquire):
            U = _unitary(hamiltonian_matrix(sys), ev.dwell)
            Ud = U.conj().T
            t0 = t
            record(t0, True)
            for k in range(1, ev.points):
                dm = DensityMatrix(dm.n, U @ dm.rho @ Ud)
                t = t0 + k * ev.dwell
                record(t, True)
    traj = Trajectory(sys.n, np.array(times), np.array(states), np.array(acquired))
    return (traj, dm) if return_final else traj
