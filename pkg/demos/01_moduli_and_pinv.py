"""Minimum modulus, reduced minimum modulus and the pseudoinverse of a matrix.

Run with ``python demos/01_moduli_and_pinv.py``.
"""

import numpy as np

from opgamma import matrix_ops as mo

np.set_printoptions(precision=4, suppress=True)

# A diagonal matrix with a kernel. m looks at the whole unit sphere, so the
# kernel forces m = 0; gamma only looks at vectors orthogonal to the kernel.
T = np.diag([0.0, 0.5, 1.0])
r = mo.moduli(T)
print("diag(0, 1/2, 1)")
print(f"  m = {r.m}, gamma = {r.gamma}, attained: {r.attains_min}, {r.attains_reduced_min}")
print(f"  gamma witness = {r.gamma_witness.real}")

# ||T+|| is the reciprocal of gamma.
P = mo.pinv(T)
print(f"  ||pinv|| = {mo.operator_norm(P)}  (1/gamma = {1 / r.gamma})")

# The same identity on a random rank-deficient complex matrix.
rng = np.random.default_rng(0)
A = (rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))) @ (rng.normal(size=(2, 4)) + 0j)
r = mo.moduli(A)
print("\nrandom 5x4 matrix of rank 2")
print(f"  rank = {mo.svd(A).rank}, m = {r.m}, gamma = {r.gamma:.6f}")
print(f"  ||pinv|| * gamma - 1 = {mo.operator_norm(mo.pinv(A)) * r.gamma - 1:.2e}")

# Least squares: pinv(A) y is the shortest minimizer of ||Ax - y||.
y = rng.normal(size=5) + 0j
x = mo.least_squares_min_norm(A, y)
print(f"  ||x|| = {np.linalg.norm(x):.6f}, residual = {np.linalg.norm(A @ x - y):.6f}")

# Adding a null-space vector keeps the residual but lengthens x.
z = mo.svd(A).null_basis()[:, 0]
print(f"  x + z: ||x+z|| = {np.linalg.norm(x + z):.6f}, residual = {np.linalg.norm(A @ (x + z) - y):.6f}")

# Polar decomposition and the bounded transform.
V, Abs = mo.polar(A)
print(f"\n  ||A - V|A||| = {mo.operator_norm(A - V @ Abs):.2e}")
F = mo.bounded_transform(A)
print(f"  ||F_A|| = {mo.operator_norm(F):.6f} < 1")
print(f"  gamma(F_A) = {mo.moduli(F).gamma:.6f}, gamma/sqrt(1+gamma^2) = {r.gamma / np.sqrt(1 + r.gamma**2):.6f}")
print(f"  round trip error = {mo.operator_norm(mo.inverse_bounded_transform(F) - A):.2e}")

# The zero matrix: the carrier sphere is empty, so gamma = inf and pinv = 0.
r = mo.moduli(np.zeros((2, 2)))
print(f"\nzero matrix: gamma = {r.gamma}, pinv_norm = {r.pinv_norm}")
