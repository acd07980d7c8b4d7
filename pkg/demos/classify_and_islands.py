"""Delay-independent classes and the stability islands of a class-II mode.

Run with ``python demos/classify_and_islands.py``.

The gains (6, 0, 0.3, 0) have no velocity feedback at all, so without delay
the agent is a pure oscillator.  Adding a delay first destabilizes it, then
a sequence of stable windows opens and closes until the destabilizing
sequence (higher crossing frequency) outruns the stabilizing one.
"""

import numpy as np

from delayform import classify_gains, lambda_max, mode_system, switching_delays

GAINS = {
    "oscillator (k0=6, k0_tau=0.3)": (6.0, 0.0, 0.3, 0.0),
    "pure delayed feedback": (0.0, 0.0, 1.0, 1.5),
    "well damped": (2.0, 3.0, 1.5, 1.2),
    "negative stiffness": (-3.0, 0.0, 1.5, -3.0),
}

for name, g in GAINS.items():
    lab = classify_gains(g)
    print(f"{name:32s} class {lab.cls}  crossings {np.round(lab.crossing.frequencies, 5)}")

lab = classify_gains(GAINS["oscillator (k0=6, k0_tau=0.3)"])
sd = switching_delays(lab, horizon=30.0)
print("\nstable windows in tau:")
for a, b in sd.stable_windows():
    # sample the middle of each window to confirm the sign numerically
    mid = 0.5 * (a + b)
    lm = lambda_max(mode_system(GAINS["oscillator (k0=6, k0_tau=0.3)"], None, 0.0, mid))
    print(f"  ({a:8.4f}, {b:8.4f})   lambda_max at midpoint = {lm:+.4f}")

# Past tau ~ 25 no window survives.
print("lambda_max at tau=27:", lambda_max(mode_system(GAINS["oscillator (k0=6, k0_tau=0.3)"], None, 0.0, 27.0)))
