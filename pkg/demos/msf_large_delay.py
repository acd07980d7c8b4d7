"""Master stability function boundary and its large-delay circle.

With p0 = (3, 6, 0, 0) and pbar = (0, 0, -2, 0) the boundary curve
lambda(i omega) collapses onto the circle |lambda| = 1.5 as tau grows.  For
these gains the deviation falls off like 1/tau**2.  The self-intersections
of the curve and their angles are printed next to the asymptotic
predictions.
"""

import math

import numpy as np

from delayform import lambda_boundary
from delayform.msf import (
    GridSpec,
    circle_convergence_metric,
    intersection_angles,
    large_delay_asymptote,
    msf_field,
)

P0, PBAR = (3.0, 6.0, 0.0, 0.0), (0.0, 0.0, -2.0, 0.0)

for tau in (30.0, 100.0, 1000.0):
    w = np.linspace(-2 * math.pi / tau, 2 * math.pi / tau, 2001)
    c = lambda_boundary(P0, PBAR, tau, w)
    dev = np.max(np.abs(np.hypot(c.x, c.y) - 1.5))
    print(f"tau={tau:7.1f}  max | |lambda| - 1.5 | = {dev:.3e}   metric {circle_convergence_metric(P0, PBAR, tau):.3e}")

tau = 100.0
ac = large_delay_asymptote(P0, PBAR, tau, j_max=3)
print(f"\nlambda0 = {ac.lambda0}, slope = {ac.slope}")
for a in intersection_angles(ac, P0, PBAR):
    print(f"j={a.j}: numeric {a.numeric:.5f}  asymptotic {a.asymptotic:.5f}  leading order {a.leading_order:.5f}")

# a coarse field; the stable region is the component around lambda = 0
field = msf_field(P0, PBAR, 10.0, GridSpec(-3, 3, -3, 3, 31, 31))
print(f"\ntau=10: Lambda_max(0) = {field.origin_value:.4f}, stable nodes around the origin: {field.region_mask.sum()}")
