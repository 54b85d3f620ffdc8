"""End-to-end runs: initial state, sequence, detection, and the oracle cross-check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qoracle
from .algebra import get_basis
from .dynamics import StateVector, Trajectory, evolve_grid, generator, run_sequence
from .signal import Fid, Spectrum, acquire_fid, spectrum
from .spinsys import Acquire
from .thermal import ThermalMode, thermal_state

__all__ = ["SimulationResult", "VerifyReport", "initial_state", "simulate", "simulate_oracle", "verify"]


@dataclass
class SimulationResult:
    trajectory: Trajectory
    fid: Fid | None
    spectrum: Spectrum | None


def initial_state(cfg) -> StateVector:
    if cfg.initial is not None:
        return cfg.initial
    return thermal_state(cfg.system, cfg.thermal)


def _has_acquire(seq) -> bool:
    return any(isinstance(ev, Acquire) for ev in seq)


def _detect(cfg, traj):
    if not _has_acquire(cfg.sequence):
        return None, None
    fid = acquire_fid(traj, cfg.system, cfg.receiver_weights)
    spec = spectrum(fid, cfg.line_broadening_hz, cfg.zero_fill, cfg.peak_threshold)
    return fid, spec


def simulate(cfg) -> SimulationResult:
    """Classical pipeline: initial state, run_sequence, FID, spectrum."""
    traj = run_sequence(cfg.system, cfg.sequence, initial_state(cfg), cfg.method, **cfg.tolerances)
    return SimulationResult(traj, *_detect(cfg, traj))


def _oracle_rho0(cfg) -> qoracle.DensityMatrix:
    if cfg.initial is None and cfg.thermal is ThermalMode.EXACT:
        return qoracle.thermal_rho(cfg.system)
    return qoracle.state_to_rho(initial_state(cfg))


def simulate_oracle(cfg) -> SimulationResult:
    """Same pipeline with the dense density-matrix simulator doing the dynamics."""
    traj = qoracle.run_sequence_rho(cfg.system, cfg.sequence, _oracle_rho0(cfg))
    return SimulationResult(traj, *_detect(cfg, traj))


@dataclass
class VerifyReport:
    n: int
    max_deviation: float
    per_observable: dict  # name -> worst absolute deviation
    snapshots: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def worst(self, k: int = 10) -> list:
        return sorted(self.per_observable.items(), key=lambda kv: -kv[1])[:k]


def verify(cfg, horizon: float, samples: int, tol: float = 1e-8) -> VerifyReport:
    """Compare classical and oracle expectation trajectories.

    Both pipelines run the configured sequence from identical initial data,
    then evolve freely under the longitudinal Hamiltonian for ``horizon``
    seconds sampled at ``samples`` points. The deviation is the uniform norm
    over all snapshots of the per-molecule expectation values.
    """
    if cfg.system.n > qoracle.ORACLE_MAX_N:
        raise ValueError(f"oracle ceiling exceeded: n={cfg.system.n} > {qoracle.ORACLE_MAX_N}")
    if samples < 1 or not horizon >= 0:
        raise ValueError("need samples >= 1 and horizon >= 0")
    classical = run_sequence(cfg.system, cfg.sequence, initial_state(cfg), cfg.method, **cfg.tolerances)
    rho0 = _oracle_rho0(cfg)
    reference, final_rho = qoracle.run_sequence_rho(cfg.system, cfg.sequence, rho0, return_final=True)
    times = np.linspace(0.0, horizon, samples)
    tail_c = evolve_grid(classical.final, generator(cfg.system), times, cfg.method, **cfg.tolerances)
    tail_q = qoracle.expectation_series(final_rho, cfg.system, None, times)

    a = np.vstack([classical.values, tail_c])
    b = np.vstack([reference.values, tail_q])
    if a.shape != b.shape:
        raise RuntimeError("classical and oracle snapshot grids differ")
    dev = np.abs(a - b).max(axis=0)
    names = get_basis(cfg.system.n).names()
    return VerifyReport(
        n=cfg.system.n,
        max_deviation=float(dev.max()),
        per_observable=dict(zip(names, map(float, dev))),
        snapshots=a.shape[0],
        tolerance=tol,
    )

