"""Estimation cost on a channel whose subspace parameters are known exactly.

The 50:50 thermal beam splitter admits a closed form for the maximal
eigenvalues and their overlap, so the pipeline can run twice on identical
homodyne data: once estimating those parameters from the moments, once
injecting the exact values.  The gap between the two columns is the price
of homodyne-only estimation; the projection itself tolerates several
times more noise.
"""

import numpy as np

from entbound import (
    InputSpec,
    ThermalSplitterChannel,
    min_negativity,
    simulate_thermal_splitter,
)

ALPHAS = np.arange(0.2, 1.6, 0.1)

print(f"{'V = n_bar':>9} {'best estimated':>15} {'best exact':>12}")
for n_bar in (0.01, 0.03, 0.05, 0.08, 0.12, 0.16):
    best = {"estimated": 0.0, "exact": 0.0}
    for alpha in ALPHAS:
        probe, exact = simulate_thermal_splitter(
            InputSpec(float(alpha)), ThermalSplitterChannel(n_bar)
        )
        best["estimated"] = max(best["estimated"], min_negativity(probe).bound)
        best["exact"] = max(
            best["exact"], min_negativity(probe, mode="exact", exact=exact).bound
        )
    print(f"{n_bar:9.3f} {best['estimated']:15.6f} {best['exact']:12.6f}")

print("""
Estimated-mode certificates die near 2-3% of the vacuum noise (the
channel is 50% lossy), while exact subspace knowledge keeps them alive
beyond 15%.
""")

# The exact subspace data for one point, for the curious.
probe, exact = simulate_thermal_splitter(InputSpec(1.0), ThermalSplitterChannel(0.1))
print(f"alpha=1.0, n_bar=0.1: lambda0 = {exact.lambda0:.6f}, "
      f"overlap_s = {exact.overlap_s:.6f}, measured var = {probe.state0.var_x:.3f}")
