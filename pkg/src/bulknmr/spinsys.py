"""Spin systems, fields, pulse programs and the Hamiltonian coefficient vector.

Units are rad/s throughout with hbar = 1. ``beta`` is therefore measured in
seconds (an inverse energy expressed as an inverse angular frequency).

The Hamiltonian of one molecule is

    H = -sum_p gamma_p B . S^p - sum_{p<q} J_pq S^p . S^q

i.e. the J sign convention is ``-J S.S``. Textbook ``+2 pi J I.S``
conventions differ by a sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .algebra import Axis, get_basis, _check_n

__all__ = [
    "SpinSystem",
    "FieldMode",
    "FieldSpec",
    "Evolve",
    "HardPulse",
    "Acquire",
    "PulseSequence",
    "Violation",
    "SequenceError",
    "hamiltonian_coeffs",
    "find_violations",
    "validate_sequence",
]


def _finite_array(name, value, shape=None):
    arr = np.array(value, dtype=float)
    if shape is not None and arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Physical parameters of one molecule type.

    Attributes
    ----------
    omega : array of float
        Per-nucleus Larmor (or rotating-frame offset) angular frequency, rad/s.
    J : (n, n) array of float
        Symmetric coupling matrix in rad/s with zero diagonal.
    gamma : array of float
        Gyromagnetic ratios in rad/s/T. Used for explicit fields and as the
        default receiver weights. Defaults to ones.
    N : float
        Number of molecules in the sample.
    beta : float
        Inverse temperature in seconds.
    """

    omega: np.ndarray
    J: np.ndarray = None
    gamma: np.ndarray = None
    N: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        omega = _finite_array("omega", self.omega)
        if omega.ndim != 1:
            raise ValueError("omega must be one-dimensional")
        n = _check_n(len(omega))
        J = np.zeros((n, n)) if self.J is None else self.J
        J = _finite_array("J", J, (n, n))
        if not np.array_equal(J, J.T):
            raise ValueError("J must be symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("J must have a zero diagonal")
        gamma = np.ones(n) if self.gamma is None else self.gamma
        gamma = _finite_array("gamma", gamma, (n,))
        if not (math.isfinite(self.N) and self.N >= 1):
            raise ValueError(f"molecule count N must be >= 1, got {self.N}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def n(self) -> int:
        return len(self.omega)

    @classmethod
    def from_hz(cls, offsets_hz, j_hz=None, **kwargs) -> "SpinSystem":
        """Build from frequencies in Hz (offsets and couplings), converting by 2 pi."""
        omega = 2 * np.pi * np.asarray(offsets_hz, dtype=float)
        J = None if j_hz is None else 2 * np.pi * np.asarray(j_hz, dtype=float)
        return cls(omega=omega, J=J, **kwargs)

    def permuted(self, perm) -> "SpinSystem":
        """Relabel nuclei so that new nucleus ``i`` is old nucleus ``perm[i]`` (0-based)."""
        perm = list(perm)
        return SpinSystem(
            omega=self.omega[perm],
            J=self.J[np.ix_(perm, perm)],
            gamma=self.gamma[perm],
            N=self.N,
            beta=self.beta,
        )


class FieldMode(enum.Enum):
    LONGITUDINAL_OMEGA = "longitudinal"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class FieldSpec:
    """Field applied during a constant evolution segment.

    ``LONGITUDINAL_OMEGA`` uses ``SpinSystem.omega`` as the z term, optionally
    with transverse components ``(Bx, By)`` in Tesla coupled through gamma.
    ``EXPLICIT`` takes a full ``B`` vector in Tesla and ignores omega.
    """

    mode: FieldMode = FieldMode.LONGITUDINAL_OMEGA
    B: tuple | None = None
    transverse: tuple | None = None

    def __post_init__(self):
        mode = FieldMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is FieldMode.EXPLICIT:
            if self.B is None or self.transverse is not None:
                raise ValueError("explicit field needs B and no separate transverse part")
            B = tuple(float(b) for b in self.B)
            if len(B) != 3 or not all(map(math.isfinite, B)):
                raise ValueError(f"B must be three finite components, got {self.B}")
            object.__setattr__(self, "B", B)
        else:
            if self.B is not None:
                raise ValueError("longitudinal mode takes no B vector")
            if self.transverse is not None:
                tr = tuple(float(b) for b in self.transverse)
                if len(tr) != 2 or not all(map(math.isfinite, tr)):
                    raise ValueError(f"transverse must be (Bx, By), got {self.transverse}")
                object.__setattr__(self, "transverse", tr)

    @classmethod
    def explicit(cls, B) -> "FieldSpec":
        return cls(FieldMode.EXPLICIT, B=tuple(B))


def hamiltonian_coeffs(sys: SpinSystem, field: FieldSpec | None = None) -> np.ndarray:
    """Coefficients of the one-molecule Hamiltonian over the canonical basis.

    Rank-1 entries are ``-gamma_p B_i`` (``-omega_p`` for z in longitudinal
    mode); rank-2 entries ``C[pi,qi]`` (``p < q``) are ``-J_pq``; all other
    entries are zero.
    """
    field = FieldSpec() if field is None else field
    n = sys.n
    basis = get_basis(n)
    h = np.zeros(len(basis))
    if field.mode is FieldMode.EXPLICIT:
        B = np.asarray(field.B)
    else:
        bx, by = field.transverse or (0.0, 0.0)
        B = np.array([bx, by, 0.0])
    for p in range(n):
        for i, axis in enumerate(Axis):
            h[basis.index_of((p + 1,), (axis,))] = -sys.gamma[p] * B[i]
        if field.mode is FieldMode.LONGITUDINAL_OMEGA:
            h[basis.index_of((p + 1,), (Axis.Z,))] = -sys.omega[p]
    for p in range(n):
        for q in range(p + 1, n):
            if sys.J[p, q] != 0:
                for axis in Axis:
                    h[basis.index_of((p + 1, q + 1), (axis, axis))] = -sys.J[p, q]
    if not np.all(np.isfinite(h)):
        raise ValueError("Hamiltonian coefficients are not finite")
    return h


@dataclass(frozen=True)
class Evolve:
    duration: float
    field: FieldSpec = field(default_factory=FieldSpec)


@dataclass(frozen=True)
class HardPulse:
    """Ideal instantaneous rotation of ``targets`` (1-based nuclei) about ``axis``."""

    targets: tuple
    axis: Axis
    angle: float


@dataclass(frozen=True)
class Acquire:
    dwell: float
    points: int


Event = Union[Evolve, HardPulse, Acquire]


@dataclass(frozen=True)
class PulseSequence:
    events: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


@dataclass(frozen=True)
class Violation:
    event: int
    kind: str
    message: str

    def __str__(self):
        return f"event {self.event}: {self.message}"


class SequenceError(ValueError):
    """Raised by :func:`validate_sequence`; carries the full violation list."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(map(str, self.violations)))


def _is_finite_number(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False


def find_violations(seq, sys: SpinSystem) -> list:
    """List every problem with ``seq`` for ``sys``; empty when valid."""
    out = []
    acquires = 0
    for i, ev in enumerate(seq):
        if isinstance(ev, Evolve):
            if not _is_finite_number(ev.duration) or float(ev.duration) <= 0:
                out.append(Violation(i, "duration", f"nonpositive duration {ev.duration!r}"))
            if not isinstance(ev.field, FieldSpec):
                out.append(Violation(i, "field", "field must be a FieldSpec"))
        elif isinstance(ev, HardPulse):
            targets = tuple(ev.targets)
            if not targets:
                out.append(Violation(i, "targets", "pulse has no targets"))
            for t in targets:
                if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or not 1 <= t <= sys.n:
                    out.append(Violation(i, "target", f"target out of range: {t!r} (n={sys.n})"))
            if len(set(targets)) != len(targets):
                out.append(Violation(i, "target", f"duplicate targets {targets}"))
            try:
                Axis.parse(ev.axis)
            except (ValueError, KeyError):
                out.append(Violation(i, "axis", f"unknown axis {ev.axis!r}"))
            if not _is_finite_number(ev.angle):
                out.append(Violation(i, "angle", f"non-finite angle {ev.angle!r}"))
        elif isinstance(ev, Acquire):
            acquires += 1
            if acquires > 1:
                out.append(Violation(i, "acquire", "multiple Acquire events"))
            if not _is_finite_number(ev.dwell) or float(ev.dwell) <= 0:
                out.append(Violation(i, "duration", f"nonpositive dwell {ev.dwell!r}"))
            if isinstance(ev.points, bool) or not isinstance(ev.points, (int, np.integer)) or ev.points < 2:
                out.append(Violation(i, "points", f"acquisition needs >= 2 points, got {ev.points!r}"))
        else:
            out.append(Violation(i, "event", f"unknown event type {type(ev).__name__}"))
    return out


def validate_sequence(seq, sys: SpinSystem) -> PulseSequence:
    """Return a normalized copy of ``seq`` or raise :class:`SequenceError`.

    Violations are reported, never corrected.
    """
    events = tuple(seq)
    violations = find_violations(events, sys)
    if violations:
        raise SequenceError(violations)
    normalized = []
    for ev in events:
        if isinstance(ev, Evolve):
            normalized.append(Evolve(float(ev.duration), ev.field))
        elif isinstance(ev, HardPulse):
            normalized.append(HardPulse(tuple(sorted(int(t) for t in ev.targets)),
                                        Axis.parse(ev.axis), float(ev.angle)))
        else:
            normalized.append(Acquire(float(ev.dwell), int(ev.points)))
    return PulseSequence(tuple(normalized))
