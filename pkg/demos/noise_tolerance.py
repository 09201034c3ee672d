"""Where the certificate dies: noise tolerance with and without loss.

Scans the excess noise V for the best input overlap and reports the last
grid point with a non-trivial bound.  Loss shrinks the tolerable noise.
"""

import numpy as np

from entbound import InputSpec, LossNoiseChannel, min_negativity, simulate_loss_noise

C_GRID = np.arange(0.1, 1.0, 0.1)

for T in (1.0, 0.7, 0.5):
    print(f"T = {T}:")
    threshold = 0.0
    for V in np.arange(0.005, 0.065, 0.005):
        best, best_c = 0.0, None
        for c in C_GRID:
            probe = simulate_loss_noise(
                InputSpec.from_overlap(float(c)), LossNoiseChannel(T, float(V))
            )
            b = min_negativity(probe).bound
            if b > best:
                best, best_c = b, float(c)
        marker = ""
        if best > 1e-4:
            threshold = V
        else:
            marker = "  <- trivial"
        print(f"  V = {V:5.3f}: best bound = {best:8.5f}"
              + (f" at c = {best_c:.1f}" if best_c else "") + marker)
    print(f"  last non-trivial V: {threshold:.3f} SNU\n")
