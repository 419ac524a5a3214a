"""Gap between the unbounded diagonal T e_m = m e_m and the scalar operators nI."""

import math

import numpy as np

from opgamma import lazy_ops as lz
from opgamma import metrics as me
from opgamma.lazy_ops import FormulaTail, LazyOperator

T = LazyOperator.diagonal((), FormulaTail([0, 1], [1], math.inf, "increasing"))
N = 200
M = lz.truncate(T, N)

print(" n   closed form   max{1,|n-1|/sqrt2}/sqrt(1+n^2)   truncated N=200")
for n in range(1, 6):
    closed = lz.theta_nI_lazy(T, n)
    formula = max(1, abs(n - 1) / math.sqrt(2)) / math.sqrt(1 + n * n)
    trunc = me.gap_by_definition(M, n * np.eye(N))
    print(f" {n}   {closed:.9f}   {formula:.9f}                      {trunc:.9f}")

# For n = 1, 2 the supremum is the limit 1 of |m - n|/sqrt(1+m^2) as m grows.
# No finite corner contains it, and the deficit shrinks like n/N.
for N in (200, 400, 800):
    d = lz.theta_nI_lazy(T, 1) - me.gap_by_definition(lz.truncate(T, N), np.eye(N))
    print(f"n=1 deficit at N={N}: {d:.2e}")

# A negative eigenvalue at -1/n pushes the gap to its maximum 1.
print(f"\ntheta(diag(-1/2), 2I) = {me.theta_nI_matrix(np.diag([-0.5]), 2)}")
print(f"theta(diag(-1/2, 1, 2, ...), 2I) = {lz.theta_nI_lazy(LazyOperator.diagonal([-0.5], T.weights.tail), 2)}")
