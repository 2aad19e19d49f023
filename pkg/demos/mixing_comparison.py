"""Auxiliary-variables chain against a random-transposition Metropolis chain."""

from macdonald_chain.convergence import mixing_time
from macdonald_chain.exact_chain import aux_matrix, metropolis_matrix
from macdonald_chain.measures import pi_qt_table

q, t, eps = 4.0, 2.0, 0.1

print(" k   aux from (k)   aux from (1^k)   metropolis from (k)")
for k in (6, 8, 10, 12):
    pi = pi_qt_table(k, q, t, "float")
    A = aux_matrix(k, q, t, "float")
    top = mixing_time(A, (k,), eps, pi)
    ones = mixing_time(A, (1,) * k, eps, pi)
    met = mixing_time(metropolis_matrix(k, q, t, "float"), (k,), eps, pi)
    print(f"{k:2d}   {top:12d}   {ones:14d}   {met:19d}")
