"""Classical propagation of per-molecule expectation values.

The state is the vector ``v_j = <B_j>`` over the canonical product-operator
basis. It evolves linearly, ``dv/dt = A v``, with ``A`` from
:func:`bulknmr.algebra.adjoint_generator`. Hard pulses act as SO(3)
rotations on every tensor slot of the targeted nuclei.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .algebra import Axis, adjoint_generator, build_structure_table, get_basis, parse_operator, _check_n
from .propagate import NumericalError, expm_action, rk_solve
from .spinsys import Acquire, Evolve, HardPulse, SpinSystem, hamiltonian_coeffs, validate_sequence

__all__ = [
    "Method",
    "StateVector",
    "Trajectory",
    "EventError",
    "generator",
    "evolve_constant",
    "evolve_grid",
    "rotation_matrix",
    "apply_rotation",
    "run_sequence",
]


class Method(enum.Enum):
    EXACT_EXPONENTIAL = "exact"
    ADAPTIVE_RK = "rk"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Per-molecule expectation values over the canonical basis of ``n`` nuclei."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        values = np.array(self.values, dtype=float)
        if values.shape != (4**self.n - 1,):
            raise ValueError(f"state for n={self.n} needs {4**self.n - 1} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("state values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n: int) -> "StateVector":
        return cls(n, np.zeros(4**n - 1))

    @classmethod
    def from_mapping(cls, n: int, mapping: dict) -> "StateVector":
        """Build from ``{name_or_operator: value}``, e.g. ``{"S[1x]": 0.5}``."""
        basis = get_basis(n)
        v = np.zeros(len(basis))
        for key, val in mapping.items():
            op = parse_operator(key, n) if isinstance(key, str) else key
            v[basis.index(op)] = val
        return cls(n, v)

    def __getitem__(self, name: str) -> float:
        return float(self.values[get_basis(self.n).index(parse_operator(name, self.n))])

    def weighted_norm2(self) -> float:
        """``sum_j 4**rank_j v_j**2``, conserved by the dynamics."""
        return float(np.sum(4.0 ** get_basis(self.n).ranks * self.values**2))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots of the state; ``acquired`` marks the acquisition grid."""

    n: int
    times: np.ndarray
    values: np.ndarray
    acquired: np.ndarray = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float).reshape(len(times), -1)
        if values.shape[1] != 4**self.n - 1:
            raise ValueError("snapshot width does not match the basis size")
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        acquired = np.zeros(len(times), bool) if self.acquired is None else np.asarray(self.acquired, bool)
        if acquired.shape != times.shape:
            raise ValueError("acquired mask must match times")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "acquired", acquired)

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list:
        return [StateVector(self.n, v) for v in self.values]

    @property
    def final(self) -> StateVector:
        return StateVector(self.n, self.values[-1])

    def acquisition(self) -> "Trajectory":
        """Sub-trajectory of acquisition snapshots, or the whole trajectory if none."""
        if not self.acquired.any():
            return self
        m = self.acquired
        return Trajectory(self.n, self.times[m], self.values[m], m[m])

    def column(self, name: str) -> np.ndarray:
        return self.values[:, get_basis(self.n).index(parse_operator(name, self.n))]


class EventError(RuntimeError):
    """Failure while executing one event of a pulse sequence."""

    def __init__(self, index: int, event, cause: Exception):
        super().__init__(f"event {index} ({type(event).__name__}): {cause}")
        self.index = index
        self.event = event
        self.cause = cause


def generator(sys: SpinSystem, field=None):
    """Sparse generator for ``sys`` under ``field`` (default: longitudinal omega)."""
    table = build_structure_table(sys.n, eager=False)
    return adjoint_generator(table, hamiltonian_coeffs(sys, field))


def _skew_form(A, n):
    """``S A S^-1`` with ``S = diag(2**rank)``; antisymmetric for any real Hamiltonian."""
    s = 2.0 ** get_basis(n).ranks
    K = sp.csr_matrix(A, copy=True)
    rows = np.repeat(np.arange(K.shape[0]), np.diff(K.indptr))
    K.data *= s[rows] / s[K.indices]
    return K, s


def evolve_grid(state: StateVector, A, times, method=Method.EXACT_EXPONENTIAL,
                *, rtol=1e-10, atol=1e-12, krylov_tol=1e-12, krylov_dim=None) -> np.ndarray:
    """States at each of ``times`` (nondecreasing, relative to ``state``)."""
    method = Method(method)
    if A.shape != (len(state.values),) * 2:
        raise ValueError(f"generator shape {A.shape} does not match state of n={state.n}")
    if A.nnz == 0:
        return np.tile(state.values, (len(times), 1))
    if method is Method.EXACT_EXPONENTIAL:
        K, s = _skew_form(A, state.n)
        out = expm_action(K, s * state.values, times, tol=krylov_tol, m=krylov_dim, skew=True)
        return out / s
    return rk_solve(A, state.values, times, rtol=rtol, atol=atol)


def evolve_constant(state: StateVector, A, t: float, method=Method.EXACT_EXPONENTIAL,
                    **tolerances) -> StateVector:
    """Solve ``dv/dt = A v`` over a duration ``t`` from ``state``.

    ``EXACT_EXPONENTIAL`` applies ``exp(tA)`` through a Krylov approximation
    with a local error bound of ``krylov_tol``; ``ADAPTIVE_RK`` runs an
    embedded Dormand-Prince pair at ``rtol``/``atol``.
    """
    if not t >= 0:
        raise ValueError(f"duration must be >= 0, got {t}")
    return StateVector(state.n, evolve_grid(state, A, [t], method, **tolerances)[0])


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Active right-handed SO(3) rotation, ``R(z, a) x = cos(a) x + sin(a) y``."""
    axis = Axis.parse(axis)
    c, s = np.cos(angle), np.sin(angle)
    i, j = [a - 1 for a in Axis if a is not axis]
    # (i, j) is cyclic after axis for x->(y,z), z->(x,y); for y it is (x, z) and needs the sign flipped
    if axis is Axis.Y:
        s = -s
    R = np.eye(3)
    R[i, i] = R[j, j] = c
    R[j, i] = s
    R[i, j] = -s
    return R


def apply_rotation(state: StateVector, targets, axis, angle: float) -> StateVector:
    """Rotate every tensor slot belonging to the target nuclei (1-based)."""
    n = state.n
    targets = tuple(targets)
    for t in targets:
        if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or not 1 <= t <= n:
            raise ValueError(f"target out of range: {t!r} (n={n})")
    basis = get_basis(n)
    T = np.zeros(4**n)
    T[basis.codes] = state.values
    T = T.reshape((4,) * n)
    R4 = np.eye(4)
    R4[1:, 1:] = rotation_matrix(axis, angle)
    for p in sorted(set(targets)):
        T = np.moveaxis(np.tensordot(R4, T, axes=([1], [p - 1])), 0, p - 1)
    return StateVector(n, T.reshape(-1)[basis.codes])


def run_sequence(sys: SpinSystem, seq, v0: StateVector, method=Method.EXACT_EXPONENTIAL,
                 **tolerances) -> Trajectory:
    """Apply ``seq`` to ``v0`` and return all snapshots.

    Snapshots are taken at ``t = 0``, at the end of each evolution segment
    and on the acquisition grid. A snapshot at time ``t`` holds the state
    after every instantaneous event at ``t`` (a pulse right after an
    evolution replaces that evolution's snapshot).
    """
    if v0.n != sys.n:
        raise ValueError(f"initial state has n={v0.n}, system n={sys.n}")
    seq = validate_sequence(seq, sys)
    times, states, acquired = [0.0], [v0.values], [False]
    state = v0
    t = 0.0
    generators = {}

    def gen(field):
        if field not in generators:
            generators[field] = generator(sys, field)
        return generators[field]

    def record(time, values, is_acq):
        if time == times[-1]:
            states[-1] = values
            acquired[-1] = acquired[-1] or is_acq
        else:
            times.append(time)
            states.append(values)
            acquired.append(is_acq)

    for i, ev in enumerate(seq):
        try:
            if isinstance(ev, Evolve):
                state = evolve_constant(state, gen(ev.field), ev.duration, method, **tolerances)
                t += ev.duration
                record(t, state.values, False)
            elif isinstance(ev, HardPulse):
                state = apply_rotation(state, ev.targets, ev.axis, ev.angle)
                record(t, state.values, False)
            elif isinstance(ev, Acquire):
                offsets = np.arange(ev.points) * ev.dwell
                block = evolve_grid(state, gen(None), offsets, method, **tolerances)
                for k, values in enumerate(block):
                    record(t + offsets[k], values, True)
                state = StateVector(sys.n, block[-1])
                t = t + offsets[-1]
        except (NumericalError, ValueError) as exc:
            raise EventError(i, ev, exc) from exc
    return Trajectory(sys.n, np.array(times), np.array(states), np.array(acquired))
