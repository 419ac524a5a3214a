"""Gap metric, carrier-graph metric and the corrected distance to ``nI``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .core import InvariantError, ToleranceContext, ValidationError, resolve_context
from .matrix_ops import (
    as_matrix,
    carrier_graph_projection,
    graph_projection,
    hermitian_function,
    is_hermitian,
    null_projection,
    operator_norm,
)

__all__ = [
    "GapReport",
    "subspace_gap",
    "gap_by_definition",
    "gap_by_formula",
    "gap_same_domain",
    "carrier_gap",
    "theta_nI_matrix",
    "theta_nI_spectral",
]


@dataclass(frozen=True)
class GapReport:
    theta_definition: float
    theta_formula: float
    theta_same_domain: Optional[float]
    eta: float
    null_gap: float
    discrepancy: float

    def violations(self, tol: float) -> list[str]:
        out = []
        if abs(self.theta_definition - self.theta_formula) > tol:
            out.append("gap formula disagrees with definition")
        vals = [self.theta_definition, self.theta_formula, self.eta, self.null_gap]
        if self.theta_same_domain is not None:
            vals.append(self.theta_same_domain)
        if any(v < -tol or v > 1 + tol for v in vals):
            out.append("a gap lies outside [0, 1]")
        if abs(self.eta - self.null_gap) > self.theta_definition + tol:
            out.append("|eta - null_gap| exceeds theta")
        if self.theta_definition > self.eta + self.null_gap + tol:
            out.append("theta exceeds eta + null_gap")
        return out

    def to_dict(self) -> dict:
        return asdict(self)


def _pair(A, B):
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValidationError(f"shape mismatch: {A.shape} vs {B.shape}")
    return A, B


def _is_projection(P, tol) -> bool:
    return (
        P.ndim == 2
        and P.shape[0] == P.shape[1]
        and np.max(np.abs(P - P.conj().T)) <= tol
        and np.max(np.abs(P @ P - P)) <= tol
    )


def subspace_gap(P, Q, ctx: Optional[ToleranceContext] = None) -> float:
    """``||P - Q||`` for two orthogonal projections of the same size."""
    ctx = resolve_context(ctx)
    P, Q = np.asarray(P, dtype=complex), np.asarray(Q, dtype=complex)
    if P.shape != Q.shape:
        raise ValidationError(f"shape mismatch: {P.shape} vs {Q.shape}")
    if not (_is_projection(P, ctx.check_tol) and _is_projection(Q, ctx.check_tol)):
        raise ValidationError("subspace_gap needs Hermitian idempotent matrices")
    return operator_norm(P - Q)


def _gap(P, Q) -> float:
    # projections built here are exact up to rounding; skip input validation
    return operator_norm(P - Q)


def gap_by_definition(A, B, ctx: Optional[ToleranceContext] = None) -> float:
    ctx = resolve_context(ctx)
    A, B = _pair(A, B)
    return _gap(graph_projection(A, ctx), graph_projection(B, ctx))


def _resolvents(T):
    # (Ť^{1/2}, T̂^{1/2}) with Ť = (I + T*T)^{-1}, T̂ = (I + TT*)^{-1}
    inv_sqrt = lambda w: 1.0 / np.sqrt(1.0 + w)  # noqa: E731
    check = hermitian_function(T.conj().T @ T, inv_sqrt)
    hat = hermitian_function(T @ T.conj().T, inv_sqrt)
    return check, hat


def gap_by_formula(A, B, ctx: Optional[ToleranceContext] = None) -> float:
    """Gap from the resolvent formula, without forming graph projections."""
    S, T = _pair(A, B)
    Sc, Sh = _resolvents(S)
    Tc, Th = _resolvents(T)
    first = T @ Tc @ Sc - Th @ S @ Sc
    second = S @ Sc @ Tc - Sh @ T @ Tc
    return max(operator_norm(first), operator_norm(second))


def gap_same_domain(A, B, ctx: Optional[ToleranceContext] = None) -> float:
    """Two-term formula for operators with a common domain."""
    S, T = _pair(A, B)
    Sc, Sh = _resolvents(S)
    Tc, Th = _resolvents(T)
    D = T - S
    return max(operator_norm(Th @ D @ Sc), operator_norm(Sh @ D @ Tc))


def carrier_gap(A, B, ctx: Optional[ToleranceContext] = None) -> GapReport:
    """Fill a :class:`GapReport`; raises :class:`InvariantError` on inconsistency."""
    ctx = resolve_context(ctx)
    A, B = _pair(A, B)
    theta = gap_by_definition(A, B, ctx)
    formula = gap_by_formula(A, B, ctx)
    same = gap_same_domain(A, B, ctx)
    eta = _gap(carrier_graph_projection(A, ctx), carrier_graph_projection(B, ctx))
    nullgap = _gap(null_projection(A, ctx), null_projection(B, ctx))
    report = GapReport(
        theta_definition=theta,
        theta_formula=formula,
        theta_same_domain=same,
        eta=eta,
        null_gap=nullgap,
        discrepancy=abs(theta - formula),
    )
    bad = report.violations(ctx.check_tol)
    if nullgap <= ctx.check_tol and abs(eta - theta) > ctx.check_tol:
        bad.append("equal null spaces but eta != theta")
    if bad:
        raise InvariantError("; ".join(bad))
    return report


def theta_nI_spectral(eigenvalues, n: float) -> float:
    """``max |λ - n| / (sqrt(1+λ²) sqrt(1+n²))`` over real eigenvalues."""
    lam = np.asarray(eigenvalues, dtype=float)
    return float(np.max(np.abs(lam - n) / np.sqrt(1.0 + lam**2))) / math.sqrt(1.0 + n * n)


def theta_nI_matrix(A, n: float, ctx: Optional[ToleranceContext] = None):
    """Return ``(direct, corrected)`` for the gap between Hermitian ``A`` and ``nI``.

    ``direct`` compares graph projections; ``corrected`` evaluates
    ``||(A - nI)(I + A²)^{-1/2}|| / sqrt(1 + n²)``.
    """
    ctx = resolve_context(ctx)
    A = as_matrix(A)
    if not is_hermitian(A, ctx.check_tol):
        raise ValidationError("theta_nI_matrix needs a Hermitian matrix")
    A = (A + A.conj().T) / 2
    k = A.shape[0]
    direct = gap_by_definition(A, n * np.eye(k), ctx)
    root = hermitian_function(A @ A, lambda w: 1.0 / np.sqrt(1.0 + w))
    corrected = operator_norm((A - n * np.eye(k)) @ root) / math.sqrt(1.0 + n * n)
    return direct, corrected
