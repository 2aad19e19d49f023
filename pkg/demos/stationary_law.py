"""Stationary law at k=10 and how close one step from (k) gets to it."""

from macdonald_chain.convergence import tv_distance
from macdonald_chain.exact_chain import aux_row
from macdonald_chain.measures import pi_qt_table

q, t = 4, 2

pi = pi_qt_table(10, q, t)
print("most likely partitions of 10 at q=4, t=2")
for lam, p in sorted(pi.items(), key=lambda kv: -kv[1])[:8]:
    print(f"  {str(lam):>14}  {float(p):.6f}")

# From the one-part state every part is discarded, so the next state is
# drawn from the replacement law; its distance to pi hardly moves with k.
print("\nTV after one step from (k)")
for k in (5, 10, 15, 20, 25):
    pk = pi_qt_table(k, q, t)
    row = aux_row((k,), q, t)
    d = tv_distance([row.get(lam, 0) for lam in pk.index], pk, accumulate="float")
    print(f"  k={k:2d}  {d:.5f}")
