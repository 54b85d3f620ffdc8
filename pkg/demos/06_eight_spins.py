"""Eight coupled spins: 65535 classical variables, well past a dense simulation.

Takes a few tens of seconds.

Run: python3 demos/06_eight_spins.py
"""

import itertools
import time

import numpy as np

from bulknmr import Acquire, HardPulse, SpinSystem, ThermalMode, acquire_fid, generator, run_sequence, spectrum
from bulknmr import thermal_state

n = 8
rng = np.random.default_rng(9)
offsets = np.linspace(-200, 200, n) + rng.uniform(-5, 5, n)
J = np.zeros((n, n))
for p, q in itertools.combinations(range(n), 2):
    J[p, q] = J[q, p] = rng.uniform(1, 10)
sys = SpinSystem.from_hz(offsets, J, beta=1e-4)

t0 = time.perf_counter()
A = generator(sys)
print(f"generator {A.shape[0]}x{A.shape[1]}, {A.nnz} nonzeros, built in {time.perf_counter() - t0:.1f}s")

t0 = time.perf_counter()
v0 = thermal_state(sys, ThermalMode.HIGH_TEMPERATURE)
traj = run_sequence(sys, [HardPulse(tuple(range(1, n + 1)), "x", np.pi / 2), Acquire(1 / 1024, 1024)], v0)
spec = spectrum(acquire_fid(traj, sys), line_broadening_hz=0.5)
print(f"1024-point acquisition in {time.perf_counter() - t0:.1f}s")
for f, m in sorted(spec.peaks, key=lambda p: -p[1])[:10]:
    print(f"{f:8.1f} Hz  {m:.3e}")
