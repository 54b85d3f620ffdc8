"""Classical expectation dynamics against the single-molecule density matrix.

Random coupled systems, random mixed states, ten periods of the slowest
coupling.

Run: python3 demos/04_oracle_equivalence.py
"""

import numpy as np

from bulknmr import SpinSystem, generator, get_basis, qoracle
from bulknmr.dynamics import evolve_grid

rng = np.random.default_rng(1)

for n in (2, 3, 4):
    J = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    J[iu] = 2 * np.pi * rng.uniform(5, 50, len(iu[0])) * rng.choice([-1, 1], len(iu[0]))
    J += J.T
    sys = SpinSystem(omega=2 * np.pi * rng.uniform(-500, 500, n), J=J)

    G = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    rho = qoracle.DensityMatrix(n, G @ G.conj().T / np.trace(G @ G.conj().T).real)

    times = np.linspace(0, 10 / (np.abs(J[iu]).min() / (2 * np.pi)), 201)
    v = evolve_grid(qoracle.expectations(rho), generator(sys), times)
    ref = qoracle.expectation_series(rho, sys, None, times)

    w = 4.0 ** get_basis(n).ranks
    norm = (w * v**2).sum(axis=1)
    print(f"n={n}: {v.shape[1]} variables, horizon {times[-1]:.2f} s, "
          f"max deviation {np.abs(v - ref).max():.1e}, norm drift {np.abs(norm / norm[0] - 1).max():.1e}")
