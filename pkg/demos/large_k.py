"""Simulating at k=300 and comparing the largest part with its exact law."""

import numpy as np

from macdonald_chain.convergence import binned_pi_qt
from macdonald_chain.samplers import RngStream, aux_step

k, q, t = 300, 4.0, 2.0
chains, steps = 4000, 6

law = binned_pi_qt(k, q, t).sum(axis=1)
counts = np.zeros(k + 1)
for c in range(chains):
    rng = RngStream(0, c)
    lam = (1,) * k
    for _ in range(steps):
        lam = aux_step(lam, q, t, rng)
    counts[lam[0]] += 1

# compare on coarse bins of the largest part as a fraction of k
edges = np.linspace(0, k + 1, 11).astype(int)
print("largest part / k    simulated   exact")
for lo, hi in zip(edges[:-1], edges[1:]):
    print(f"  [{lo / k:.1f}, {hi / k:.1f})      {counts[lo:hi].sum() / chains:.3f}     {law[lo:hi].sum():.3f}")
