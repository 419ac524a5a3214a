"""Dense finite-dimensional backend.

Every routine takes a complex 2-D array and returns new arrays; nothing is
modified in place. Rank decisions go through :func:`svd` so that all of them
share one threshold: a singular value is zero iff it is at most
``rank_rel_tol * sigma_max``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    INF,
    ModulusReport,
    PreconditionError,
    ToleranceContext,
    ValidationError,
    reciprocal,
    resolve_context,
)

__all__ = [
    "SvdFactorization",
    "as_matrix",
    "svd",
    "pinv",
    "moduli",
    "absolute_value",
    "polar",
    "bounded_transform",
    "inverse_bounded_transform",
    "graph_projection",
    "carrier_graph_projection",
    "null_projection",
    "graph_projection_blocks",
    "least_squares_min_norm",
    "numerical_range_boundary",
    "hull_extreme_points",
    "operator_norm",
    "spectrum",
    "hermitian_function",
    "is_hermitian",
]


def as_matrix(A) -> np.ndarray:
    """Validate and convert to a complex 2-D array."""
    M = np.array(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValidationError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix entries must be finite")
    return M


@dataclass(frozen=True)
class SvdFactorization:
    """``A = U @ diag(s) @ Vh`` with full unitary ``U`` and ``Vh``."""

    U: np.ndarray
    s: np.ndarray
    Vh: np.ndarray
    rank: int
    threshold: float

    @property
    def V(self) -> np.ndarray:
        return self.Vh.conj().T

    def range_basis(self) -> np.ndarray:
        return self.U[:, : self.rank]

    def carrier_basis(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement of the null space."""
        return self.V[:, : self.rank]

    def null_basis(self) -> np.ndarray:
        return self.V[:, self.rank:]


def svd(A, ctx: Optional[ToleranceContext] = None) -> SvdFactorization:
    ctx = resolve_context(ctx)
    A = as_matrix(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    threshold = ctx.rank_tol_for(A.shape) * smax
    rank = int(np.count_nonzero(s > threshold)) if smax > 0 else 0
    return SvdFactorization(U, s, Vh, rank, threshold)


def pinv(A, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse ``V Σ† U*``."""
    f = svd(A, ctx)
    r = f.rank
    if r == 0:
        return np.zeros((f.Vh.shape[0], f.U.shape[0]), dtype=complex)
    return (f.V[:, :r] / f.s[:r]) @ f.U[:, :r].conj().T


def moduli(A, ctx: Optional[ToleranceContext] = None) -> ModulusReport:
    """Minimum and reduced minimum modulus of a matrix, with witnesses.

    Finite-dimensional unit spheres are compact, so both infima are attained
    whenever finite. The zero matrix has ``gamma = inf`` (empty carrier sphere).
    """
    A = as_matrix(A)
    f = svd(A, ctx)
    ncols = A.shape[1]
    V = f.V
    if f.rank < ncols:
        m = 0.0
    else:
        m = float(f.s[ncols - 1])
    min_witness = V[:, ncols - 1].copy()
    if f.rank == 0:
        gamma, gamma_witness = INF, None
    else:
        gamma = float(f.s[f.rank - 1])
        gamma_witness = V[:, f.rank - 1].copy()
    return ModulusReport(
        m=m,
        gamma=gamma,
        attains_min=True,
        attains_reduced_min=f.rank > 0,
        closed_range=True,
        bounded=True,
        pinv_norm=reciprocal(gamma),
        min_witness=min_witness,
        gamma_witness=gamma_witness,
    ).validate()


def hermitian_function(H, func, clamp: float = 0.0) -> np.ndarray:
    """Apply ``func`` to the eigenvalues of Hermitian ``H``.

    Eigenvalues below ``clamp`` (default 0) are raised to it first, which
    removes spurious negative eigenvalues of Gram matrices.
    """
    H = np.asarray(H, dtype=complex)
    H = (H + H.conj().T) / 2
    w, Q = np.linalg.eigh(H)
    w = np.maximum(w, clamp)
    return (Q * func(w)) @ Q.conj().T


def _gram(A) -> np.ndarray:
    return A.conj().T @ A


def absolute_value(A, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """``|A| = (A*A)^{1/2}``, formed as ``V diag(s) V*`` from the SVD.

    Taking the square root of the eigenvalues of ``A*A`` instead would turn
    rounding noise of size 1e-16 into singular values of size 1e-8.
    """
    A = as_matrix(A)
    _, s, Vh = np.linalg.svd(A, full_matrices=False)
    return (Vh.conj().T * s) @ Vh


def polar(A, ctx: Optional[ToleranceContext] = None):
    """Return ``(V, |A|)`` with ``V`` the partial isometry of ``A = V|A|``.

    The initial space of ``V`` is the row space of ``A``, so ``V*V`` is the
    projection onto the orthogonal complement of the null space.
    """
    A = as_matrix(A)
    f = svd(A, ctx)
    r = f.rank
    V = f.U[:, :r] @ f.Vh[:r, :]
    if r == 0:
        V = np.zeros_like(A)
    return V, absolute_value(A, ctx)


def bounded_transform(A, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """``F = A (I + A*A)^{-1/2}``; a contraction with all singular values < 1."""
    A = as_matrix(A)
    return A @ hermitian_function(_gram(A), lambda w: 1.0 / np.sqrt(1.0 + w))


def inverse_bounded_transform(F, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """``F (I - F*F)^{-1/2}``, the inverse of :func:`bounded_transform`."""
    ctx = resolve_context(ctx)
    F = as_matrix(F)
    smax = operator_norm(F)
    if not smax < 1.0 - ctx.rank_tol_for(F.shape):
        raise PreconditionError(
            f"largest singular value {smax!r} is not below 1; preimage would be unbounded"
        )
    return F @ hermitian_function(_gram(F), lambda w: 1.0 / np.sqrt(1.0 - w))


def _orth_projection(columns: np.ndarray, ctx: ToleranceContext) -> np.ndarray:
    if columns.shape[1] == 0:
        return np.zeros((columns.shape[0],) * 2, dtype=complex)
    f = svd(columns, ctx)
    Q = f.U[:, : f.rank]
    return Q @ Q.conj().T


def graph_projection(A, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """Orthogonal projection onto ``{(x, Ax)}`` in the (cols + rows)-dim sum."""
    ctx = resolve_context(ctx)
    A = as_matrix(A)
    cols = np.vstack([np.eye(A.shape[1], dtype=complex), A])
    return _orth_projection(cols, ctx)


def carrier_graph_projection(A, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """Orthogonal projection onto ``{(x, Ax) : x ⊥ N(A)}``."""
    ctx = resolve_context(ctx)
    A = as_matrix(A)
    B = svd(A, ctx).carrier_basis()
    cols = np.vstack([B, A @ B])
    return _orth_projection(cols, ctx)


def null_projection(A, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    N = svd(A, ctx).null_basis()
    return N @ N.conj().T


def graph_projection_blocks(A) -> np.ndarray:
    """Closed-form graph projection ``[[Ť, ŤA*], [AŤ, I - T̂]]``.

    Independent of :func:`graph_projection`; used as a cross-check.
    """
    A = as_matrix(A)
    n, m = A.shape
    T_check = np.linalg.inv(np.eye(m) + _gram(A))
    T_hat = np.linalg.inv(np.eye(n) + A @ A.conj().T)
    return np.block([
        [T_check, T_check @ A.conj().T],
        [A @ T_check, np.eye(n) - T_hat],
    ])


def least_squares_min_norm(A, y, ctx: Optional[ToleranceContext] = None) -> np.ndarray:
    """Least-squares solution of minimal norm, ``A† y``."""
    A = as_matrix(A)
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or y.shape[0] != A.shape[0]:
        raise ValidationError(
            f"right-hand side has shape {y.shape}, expected ({A.shape[0]},)"
        )
    return pinv(A, ctx) @ y


def numerical_range_boundary(A, angle_count: int = 360) -> np.ndarray:
    """Boundary points of the numerical range W(A).

    For each angle ``t`` the top eigenvector ``v`` of the Hermitian part of
    ``exp(-it) A`` gives the support point ``<Av, v>`` in direction ``t``.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValidationError("numerical range needs a square matrix")
    if angle_count < 4:
        raise ValidationError("angle_count must be at least 4")
    points = np.empty(angle_count, dtype=complex)
    for k in range(angle_count):
        rot = np.exp(-2j * np.pi * k / angle_count) * A
        H = (rot + rot.conj().T) / 2
        _, Q = np.linalg.eigh(H)
        v = Q[:, -1]
        points[k] = v.conj() @ A @ v
    return points


def hull_extreme_points(points, tol: float = 1e-12) -> np.ndarray:
    """Extreme points of the convex hull of complex ``points``.

    Collinear (or coincident) point sets return their two endpoints, where
    Qhull would refuse the degenerate input.
    """
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=complex).ravel()
    xy = np.column_stack([pts.real, pts.imag])
    centred = xy - xy.mean(axis=0)
    _, sv, Wt = np.linalg.svd(centred, full_matrices=False)
    scale = max(1.0, np.abs(xy).max())
    if sv.size < 2 or sv[1] <= tol * scale * np.sqrt(len(pts)):
        t = centred @ Wt[0]
        ends = pts[[int(np.argmin(t)), int(np.argmax(t))]]
        return np.unique(ends) if abs(ends[0] - ends[1]) <= tol * scale else ends
    hull = ConvexHull(xy)
    return pts[hull.vertices]


def operator_norm(A) -> float:
    A = as_matrix(A)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def spectrum(A) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValidationError("spectrum needs a square matrix")
    return np.linalg.eigvals(A)


def is_hermitian(A, tol: float) -> bool:
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and bool(
        np.max(np.abs(A - A.conj().T), initial=0.0) <= tol * max(1.0, np.abs(A).max())
    )
