"""A single spin: thermal magnetization, a 90 degree pulse, free precession.

Run: python3 demos/02_pulses_and_precession.py
"""

import numpy as np

from bulknmr import Acquire, HardPulse, SpinSystem, acquire_fid, run_sequence, spectrum, thermal_state

# 100 Hz offset in the rotating frame; beta is in seconds (hbar = 1)
sys = SpinSystem.from_hz([100.0], beta=1e-4, N=1e20)
v0 = thermal_state(sys)
print("equilibrium <S_z> per molecule:", v0["S[1z]"])
print("closed form (1/2) tanh(beta w / 2):", 0.5 * np.tanh(sys.beta * sys.omega[0] / 2))

# Tip onto -y and watch the magnetization go round.
dwell = 1 / 1024
traj = run_sequence(sys, [HardPulse((1,), "x", np.pi / 2), Acquire(dwell, 1024)], v0)
acq = traj.acquisition()
for k in range(0, 12, 2):
    print(f"t={acq.times[k]:.5f}  Sx={acq.values[k, 0]: .3e}  Sy={acq.values[k, 1]: .3e}  Sz={acq.values[k, 2]: .1e}")

# With H = -w S_z the vector turns from x toward -y, and the receiver
# s = N (Sx - i Sy) puts a positive offset at a positive frequency.
spec = spectrum(acquire_fid(traj, sys))
print("peaks (Hz, magnitude):", spec.peaks)

# A 2 pi pulse changes nothing; the observables are tensors, not spinors.
after = run_sequence(sys, [HardPulse((1,), "y", 2 * np.pi)], v0).final
print("2 pi pulse error:", np.abs(after.values - v0.values).max())
