"""Infinite diagonal and weighted-shift operators described by their weights.

Matrices always attain their moduli; these operators need not.
"""

import math

from opgamma import lazy_ops as lz
from opgamma.lazy_ops import ConstantTail, FormulaTail, LazyOperator

inv_n = FormulaTail([1], [0, 1], 0.0, "decreasing")         # 1/n
one_plus = FormulaTail([1, 1], [0, 1], 1.0, "decreasing")   # 1 + 1/n


def show(label, L):
    r = lz.moduli(L)
    print(f"{label:28s} m = {r.m:<6g} ({'attained' if r.attains_min else 'not attained'}),"
          f" gamma = {r.gamma:<6g} ({'attained' if r.attains_reduced_min else 'not attained'}),"
          f" closed range: {r.closed_range}")


show("diag(1 + 1/n)", LazyOperator.diagonal((), one_plus))
show("diag(1, 2, 2, 2, ...)", LazyOperator.diagonal([1], ConstantTail(2)))
show("diag(1/n)", LazyOperator.diagonal((), inv_n))

# T = RD: shift after diag(1/n). T has trivial kernel and never reaches m = 0,
# while its adjoint kills e_1 and so attains m = 0 there.
T = LazyOperator.forward_shift((), inv_n)
show("T = R D", T)
show("T* (backward shift)", lz.adjoint(T))
print(f"  T* minimum witness: e_{lz.moduli(lz.adjoint(T)).min_witness}")

# Attaining gamma is the same as the pseudoinverse attaining its norm.
L = LazyOperator.diagonal((), one_plus)
P = lz.pinv_lazy(L)
norm, attained, _ = lz.operator_norm_lazy(P)
print(f"\npinv(diag(1 + 1/n)) has weights n/(n+1): norm {norm}, attained: {attained}")

# The bounded transform keeps attainment and maps gamma to gamma/sqrt(1+gamma^2).
F = lz.bounded_transform_lazy(L)
print(f"gamma(F) = {lz.moduli(F).gamma:.9f} = 1/sqrt(2) = {1 / math.sqrt(2):.9f}")

# Upper-left corners of the matrix are available for cross-checks.
print("\ntruncate(T, 4):")
print(lz.truncate(T, 4).real)
