"""Thermal initial states: exact traces and the first-order expansion.

Run: python3 demos/05_thermal.py
"""

import numpy as np

from bulknmr import SpinSystem, ThermalMode, evolve_constant, generator, thermal_state

sys = SpinSystem.from_hz([300.0, -120.0], [[0, 40.0], [40.0, 0]])
scale = np.abs(sys.omega).max()

print(" beta*w     high-T error   ratio")
prev = None
for bw in [0.4, 0.2, 0.1, 0.05, 0.025]:
    s = SpinSystem(omega=sys.omega, J=sys.J, beta=bw / scale)
    err = np.abs(thermal_state(s, ThermalMode.HIGH_TEMPERATURE).values - thermal_state(s).values).max()
    print(f"{bw:7.3f}   {err:.3e}   {'' if prev is None else f'{prev / err:.3f}'}")
    prev = err

# Equilibrium does not move under its own Hamiltonian.
s = SpinSystem(omega=sys.omega, J=sys.J, beta=1e-3)
v = thermal_state(s)
print("stationarity error:", np.abs(evolve_constant(v, generator(s), 1.0).values - v.values).max())
print("<C[1z,2z]> =", v["C[1z,2z]"])
