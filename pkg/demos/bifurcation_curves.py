"""Hopf boundaries in the (k0, h0) and (lambda, h0) planes.

Each curve is parametrized by the crossing frequency omega.  Segments break
where the parametrization runs off to infinity.
"""

import numpy as np

from delayform import k0h0_boundary, lambda_h0_boundary

tau = 2.0
c = k0h0_boundary(1.5, 1.2, tau)
print(f"(k0, h0) boundary: {len(c)} samples in {len(set(c.segment_id))} segments")
for s in sorted(set(c.segment_id))[:3]:
    m = c.segment_id == s
    print(f"  segment {s}: k0 in [{c.x[m].min():.3f}, {c.x[m].max():.3f}], h0 in [{c.y[m].min():.3f}, {c.y[m].max():.3f}]")

c = lambda_h0_boundary((6.0, 0.3, 0.0), (3.0, 3.0, -0.5, 0.0), tau)
keep = np.abs(c.x) < 10
print(f"(lambda, h0) boundary: {keep.sum()} samples with |lambda| < 10")
