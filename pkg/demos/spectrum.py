"""Eigenvalues and eigenfunctions of the chain on partitions of 4, checked exactly."""

from fractions import Fraction

from macdonald_chain.exact_chain import aux_matrix
from macdonald_chain.spectral import eigen_table, gram_check

q, t = Fraction(4), Fraction(2)
M = aux_matrix(4, q, t)
T = eigen_table(4, q, t, M=M)

for lam, b, f in zip(T.index, T.beta, T.f):
    ok = M.apply(f) == [b * x for x in f]
    print(f"{str(lam):>10}  beta={str(b):>10}  ({float(b):.4f})  M f = beta f: {ok}")

print("orthogonality residual:", gram_check(T))
