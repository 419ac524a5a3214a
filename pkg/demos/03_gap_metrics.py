"""Distances between operators measured through their graphs."""

import math

import numpy as np

from opgamma import lazy_ops as lz
from opgamma import matrix_ops as mo
from opgamma import metrics as me
from opgamma.lazy_ops import FormulaTail, LazyOperator

rng = np.random.default_rng(1)
A = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
B = A + 0.1 * (rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3)))

# Three routes to the same number.
print("gap between A and a perturbation of A")
print(f"  graph projections : {me.gap_by_definition(A, B):.12f}")
print(f"  resolvent formula : {me.gap_by_formula(A, B):.12f}")
print(f"  same-domain form  : {me.gap_same_domain(A, B):.12f}")

# theta <= ||A - B|| <= sqrt(1+||A||^2) sqrt(1+||B||^2) theta
theta = me.gap_by_definition(A, B)
upper = math.sqrt(1 + mo.operator_norm(A) ** 2) * math.sqrt(1 + mo.operator_norm(B) ** 2) * theta
print(f"  {theta:.4f} <= ||A-B|| = {mo.operator_norm(A - B):.4f} <= {upper:.4f}")

# Carrier graphs forget the null space; the two metrics differ by at most
# the gap between the null spaces.
C = A.copy()
C[:, 2] = 0
r = me.carrier_gap(A, C)
print("\nA against A with its last column removed")
print(f"  theta = {r.theta_definition:.6f}, eta = {r.eta:.6f}, null gap = {r.null_gap:.6f}")
print(f"  |eta - null| = {abs(r.eta - r.null_gap):.6f} <= theta <= eta + null = {r.eta + r.null_gap:.6f}")

# Diagonal operators on l2 split into 2-dimensional pieces, one per index.
a = LazyOperator.diagonal((), FormulaTail([0, 1], [1], math.inf, "increasing"))          # n
b = LazyOperator.diagonal((), FormulaTail([1, 0, 1], [0, 1], math.inf, "increasing"))    # n + 1/n
print(f"\ngap(diag(n), diag(n + 1/n)) = {lz.gap_lazy_diag(a, b):.9f}  (1/sqrt(10) = {1 / math.sqrt(10):.9f})")
print(f"  200x200 truncation      = {me.gap_by_definition(lz.truncate(a, 200), lz.truncate(b, 200)):.9f}")
