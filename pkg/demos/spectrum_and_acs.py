"""Characteristic roots at a large delay and the asymptotic continuous spectrum.

For large tau most roots line up along ``Re mu = gamma(Im mu) / tau``.  This
script computes the roots of the well-damped mode at tau = 20 and compares
them with that curve.  One real root does not follow it: it sits at the
zero of the delayed-feedback channel, ``mu = -k0_tau / h0_tau``.
"""

import numpy as np

from delayform import acs_gamma, char_roots, default_window, delay_channel_zeros, mode_system

tau = 20.0
mode = mode_system((2.0, 3.0, 1.5, 1.2), None, 0.0, tau)
res = char_roots(mode, default_window(tau))
print(f"{res.count} roots in {res.window} (argument principle agrees: {res.expected_count})")

mu = res.mu[np.abs(res.mu.imag) <= 3]
mu = mu[np.argsort(-mu.real)]
print("\n      Re mu        Im mu    gamma(Im mu)/tau")
for m in mu[:12]:
    print(f"{m.real:11.5f}  {m.imag:11.5f}  {acs_gamma(m.imag, mode) / tau:11.5f}")

print("\ndelay-channel zero:", delay_channel_zeros(mode))
print("closest computed root:", mu[np.argmin(np.abs(mu - delay_channel_zeros(mode)[0]))])
