"""Shared random generators for the test suite."""

import numpy as np

from bulknmr import SpinSystem
from bulknmr import qoracle

TWO_PI = 2 * np.pi


def random_system(rng, n, max_offset_hz=500.0, j_range_hz=(5.0, 50.0), beta=0.0):
    """Random offsets in [-max, max] Hz and every pair coupled with |J| in ``j_range_hz``."""
    J = np.zeros((n, n))
    for p in range(n):
        for q in range(p + 1, n):
            J[p, q] = J[q, p] = TWO_PI * rng.choice([-1.0, 1.0]) * rng.uniform(*j_range_hz)
    omega = TWO_PI * rng.uniform(-max_offset_hz, max_offset_hz, n)
    return SpinSystem(omega=omega, J=J, beta=beta)


def random_rho(rng, n, rank=None):
    """Random physical density matrix (Wishart draw, full rank by default)."""
    d = 2**n
    k = d if rank is None else rank
    G = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    r = G @ G.conj().T
    return qoracle.DensityMatrix(n, r / np.trace(r).real)


def random_state(rng, n):
    return qoracle.expectations(random_rho(rng, n))
