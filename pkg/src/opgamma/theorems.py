"""Executable checks of the reduced-minimum-modulus results.

Each check is seeded, deterministic, and computes the two sides of every
identity through separate routines. Failures are returned as data with a
replayable counterexample payload; nothing here raises on a failed check.

>>> report = run_all(seed=0)            # doctest: +SKIP
>>> report.pass_count, report.fail_count  # doctest: +SKIP
(22, 0)
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import lazy_ops as lz
from . import matrix_ops as mo
from . import metrics as me
from .core import ToleranceContext, reciprocal, resolve_context
from .lazy_ops import ConstantTail, FormulaTail, LazyOperator
from .opfile import matrix_to_json, operator_to_dict

__all__ = ["CheckSpec", "CheckResult", "VerificationReport", "CHECKS", "default_spec", "run_check", "run_all"]


@dataclass(frozen=True)
class CheckSpec:
    id: str
    description: str = ""
    backend: str = "matrix"
    trials: int = 200
    dim_range: tuple = (1, 8)
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        lo, hi = self.dim_range
        if not 1 <= lo <= hi <= 16:
            raise ValueError("dim_range must lie within [1, 16]")


@dataclass
class CheckResult:
    id: str
    description: str
    passed: bool
    worst_residual: float
    evaluations: int
    counterexample: Optional[dict] = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "passed": self.passed,
            "worst_residual": self.worst_residual,
            "evaluations": self.evaluations,
            "counterexample": self.counterexample,
            "message": self.message,
        }


@dataclass
class VerificationReport:
    results: list
    wall_time: float = field(default=0.0, compare=False)

    @property
    def pass_count(self) -> int:
        return sum(r.passed for r in self.results)

    @property
    def fail_count(self) -> int:
        return len(self.results) - self.pass_count

    @property
    def all_passed(self) -> bool:
        return self.fail_count == 0

    def to_dict(self) -> dict:
        return {
            "results": [r.to_dict() for r in self.results],
            "summary": {"pass": self.pass_count, "fail": self.fail_count, "wall_time": self.wall_time},
        }


class _Tracker:
    """Collects residuals and boolean verdicts; remembers the first failure."""

    def __init__(self, tol: float):
        self.tol = tol
        self.worst = 0.0
        self.count = 0
        self.failure: Optional[tuple] = None

    def residual(self, value: float, payload: Callable[[], dict], what: str = "") -> None:
        self.count += 1
        value = float(value)
        if math.isnan(value):
            value = math.inf
        self.worst = max(self.worst, value)
        if value > self.tol and self.failure is None:
            self.failure = (payload(), f"{what} residual {value:.3e} exceeds {self.tol:.1e}")

    def require(self, ok: bool, payload: Callable[[], dict], what: str) -> None:
        self.count += 1
        if not ok and self.failure is None:
            self.failure = (payload(), what)


# ---------------------------------------------------------------------------
# random draws


def _dims(rng, spec: CheckSpec):
    lo, hi = spec.dim_range
    return int(rng.integers(lo, hi + 1)), int(rng.integers(lo, hi + 1))


def _gaussian(rng, r, c):
    return rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))


def _rank_deficient(rng, r, c):
    A = _gaussian(rng, r, c)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    keep = int(rng.integers(1, len(s) + 1))
    s[keep:] = 0.0
    return (U * s) @ Vh


def _draw(rng, spec: CheckSpec, t: int):
    """Alternate generic and rank-deficient draws; square every fourth trial."""
    r, c = _dims(rng, spec)
    if t % 4 == 3:
        c = r
    return _rank_deficient(rng, r, c) if t % 2 else _gaussian(rng, r, c)


def _unitary(rng, n):
    Q, R = np.linalg.qr(_gaussian(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _hermitian(rng, n, rank=None, psd=False):
    U = _unitary(rng, n)
    lam = rng.uniform(0.2, 3.0, n) * (1 if psd else rng.choice([-1.0, 1.0], n))
    if rank is not None:
        lam[rank:] = 0.0
    return (U * lam) @ U.conj().T


def _normal(rng, n, rank=None):
    U = _unitary(rng, n)
    lam = (rng.uniform(0.2, 3.0, n)) * np.exp(2j * np.pi * rng.uniform(size=n))
    if rank is not None:
        lam[rank:] = 0.0
    return (U * lam) @ U.conj().T


def _mat(**named):
    return lambda: {k: matrix_to_json(v) for k, v in named.items()}


def _ops(**named):
    return lambda: {k: operator_to_dict(v) for k, v in named.items()}


# ---------------------------------------------------------------------------
# lazy catalog

_inv_n = FormulaTail([1], [0, 1], 0.0, "decreasing")
_inv_n2 = FormulaTail([1], [0, 0, 1], 0.0, "decreasing")
_one_plus = FormulaTail([1, 1], [0, 1], 1.0, "decreasing")
_one_plus_sq = FormulaTail([1, 2, 1], [0, 0, 1], 1.0, "decreasing")
_two_plus = FormulaTail([1, 2], [0, 1], 2.0, "decreasing")
_two_plus_sq = FormulaTail([1, 4, 4], [0, 0, 1], 4.0, "decreasing")
_index = FormulaTail([0, 1], [1], math.inf, "increasing")
_index_sq = FormulaTail([0, 0, 1], [1], math.inf, "increasing")
_neg_one_plus = FormulaTail([-1, -1], [0, 1], -1.0, "decreasing")
_shifted_inv_sq = FormulaTail([1], [1, -2, 1], 0.0, "decreasing")  # 1/(n-1)^2, n >= 2
_half_minus = FormulaTail([-1, 1], [0, 2], 0.5, "increasing")  # (n-1)/(2n), n >= 2


@dataclass(frozen=True)
class _Entry:
    name: str
    op: LazyOperator
    gram: Optional[LazyOperator] = None  # T*T, written by hand
    modulus: Optional[LazyOperator] = None  # |T|, written by hand
    real_diagonal: bool = False


def _catalog() -> list:
    D, F, B = LazyOperator.diagonal, LazyOperator.forward_shift, LazyOperator.backward_shift
    return [
        _Entry("diag(1+1/n)", D((), _one_plus), D((), _one_plus_sq), D((), _one_plus), True),
        _Entry("diag([1], 2)", D([1], ConstantTail(2)), D([1], ConstantTail(4)), D([1], ConstantTail(2)), True),
        _Entry("diag(1/n)", D((), _inv_n), D((), _inv_n2), D((), _inv_n), True),
        _Entry("diag([0, 1/2, 1], 1)", D([0, 0.5, 1], ConstantTail(1)),
               D([0, 0.25, 1], ConstantTail(1)), D([0, 0.5, 1], ConstantTail(1)), True),
        _Entry("diag(n)", D((), _index), D((), _index_sq), D((), _index), True),
        _Entry("diag([0, 3], 2+1/n)", D([0, 3], _two_plus), D([0, 9], _two_plus_sq), D([0, 3], _two_plus), True),
        _Entry("diag(-(1+1/n))", D((), _neg_one_plus), D((), _one_plus_sq), D((), _one_plus), True),
        _Entry("diag([-1/2, 2], -1/2)", D([-0.5, 2], ConstantTail(-0.5)),
               D([0.25, 4], ConstantTail(0.25)), D([0.5, 2], ConstantTail(0.5)), True),
        _Entry("diag([3, 1], 1/2-1/(2n))", D([3, 1], _half_minus), None, None, True),
        _Entry("diag([i, i/2, i/3], i/4)", D((1j, 0.5j, 1j / 3), ConstantTail(0.25j)),
               D((1, 0.25, 1 / 9), ConstantTail(1 / 16)), D((1, 0.5, 1 / 3), ConstantTail(0.25))),
        _Entry("fshift(1/n)", F((), _inv_n), D((), _inv_n2), D((), _inv_n)),
        _Entry("bshift(1/n)", B((), _inv_n), D([0], _shifted_inv_sq), None),
        _Entry("fshift(2)", F((), ConstantTail(2)), D((), ConstantTail(4)), D((), ConstantTail(2))),
        _Entry("fshift(1+1/n)", F((), _one_plus), D((), _one_plus_sq), D((), _one_plus)),
        _Entry("bshift([0, 1], 2+1/n)", B([0, 1], _two_plus)),
    ]


def _lazy_payload(entry: _Entry):
    return _ops(operator=entry.op)


# ---------------------------------------------------------------------------
# checks


def _t1(rng, spec, ctx, tr):
    for e in _catalog():
        rep = lz.moduli(e.op, ctx)
        if math.isinf(rep.gamma):
            continue
        if rep.gamma > 0:
            pinv = lz.pinv_lazy(e.op, ctx)
            _, attained, _ = lz.operator_norm_lazy(pinv, ctx)
            rhs = attained
        else:
            rhs = False
        tr.require(rep.attains_reduced_min == rhs, _lazy_payload(e), f"{e.name}: attainment duality broken")
    for t in range(spec.trials):
        A = _draw(rng, spec, t)
        rep = mo.moduli(A, ctx)
        x0 = rep.gamma_witness
        Ax = A @ x0
        tr.residual(abs(np.linalg.norm(Ax) - rep.gamma), _mat(A=A), "gamma witness")
        P = mo.pinv(A, ctx)
        y0 = Ax / np.linalg.norm(Ax)
        pn = mo.operator_norm(P)
        tr.residual(abs(np.linalg.norm(P @ y0) - pn) / pn, _mat(A=A), "pinv norm attainment")


def _t2(rng, spec, ctx, tr):
    Z = np.zeros((3, 2))
    rep = mo.moduli(Z, ctx)
    ok = rep.gamma == math.inf and rep.pinv_norm == 0.0 and mo.operator_norm(mo.pinv(Z, ctx)) == 0.0
    tr.require(ok and reciprocal(rep.gamma) == 0.0, _mat(A=Z), "zero matrix convention")
    for t in range(spec.trials):
        A = _draw(rng, spec, t)
        pn = mo.operator_norm(mo.pinv(A, ctx))
        s = np.linalg.svd(A, compute_uv=False)
        tol = ctx.rank_tol_for(A.shape) * s[0]
        gamma = s[s > tol].min()
        tr.residual(abs(pn * gamma - 1.0), _mat(A=A), "||A+|| gamma - 1")
    for e in _catalog():
        rep = lz.moduli(e.op, ctx)
        if rep.gamma > 0 and math.isfinite(rep.gamma):
            norm, _, _ = lz.operator_norm_lazy(lz.pinv_lazy(e.op, ctx), ctx)
            tr.residual(abs(norm * rep.gamma - 1.0), _lazy_payload(e), f"{e.name} pinv norm")


def _gram_law(rng, spec, ctx, tr, field_name):
    for t in range(spec.trials):
        A = _draw(rng, spec, t)
        a = getattr(mo.moduli(A, ctx), field_name)
        g = getattr(mo.moduli(A.conj().T @ A, ctx), field_name)
        if math.isinf(a):
            tr.require(math.isinf(g), _mat(A=A), "zero matrix")
            continue
        tr.residual(abs(g - a * a), _mat(A=A), f"{field_name}(A*A) - {field_name}(A)^2")
    for e in _catalog():
        if e.gram is None:
            continue
        a = getattr(lz.moduli(e.op, ctx), field_name)
        g = getattr(lz.moduli(e.gram, ctx), field_name)
        if math.isinf(a):
            tr.require(math.isinf(g), _lazy_payload(e), e.name)
        else:
            tr.residual(abs(g - a * a), _lazy_payload(e), e.name)


def _t3(rng, spec, ctx, tr):
    _gram_law(rng, spec, ctx, tr, "gamma")


def _t4(rng, spec, ctx, tr):
    _gram_law(rng, spec, ctx, tr, "m")


def _squash(x: float) -> float:
    return 1.0 if math.isinf(x) else x / math.sqrt(1.0 + x * x)


def _t5(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A = _draw(rng, spec, t)
        F = mo.bounded_transform(A, ctx)
        ra, rf = mo.moduli(A, ctx), mo.moduli(F, ctx)
        if math.isinf(ra.gamma):
            tr.require(math.isinf(rf.gamma), _mat(A=A), "zero matrix")
        else:
            tr.residual(abs(rf.gamma - _squash(ra.gamma)), _mat(A=A), "gamma(F)")
        tr.residual(abs(rf.m - _squash(ra.m)), _mat(A=A), "m(F)")
        back = mo.inverse_bounded_transform(F, ctx)
        tr.residual(mo.operator_norm(back - A), _mat(A=A), "round trip")
        tr.require(mo.operator_norm(F) < 1.0, _mat(A=A), "||F|| < 1")
    for e in _catalog():
        ra = lz.moduli(e.op, ctx)
        rf = lz.moduli(lz.bounded_transform_lazy(e.op, ctx), ctx)
        tr.residual(abs(rf.m - _squash(ra.m)), _lazy_payload(e), f"{e.name} m(F)")
        if math.isinf(ra.gamma):
            continue
        tr.residual(abs(rf.gamma - _squash(ra.gamma)), _lazy_payload(e), f"{e.name} gamma(F)")
        tr.require(rf.bounded and (lz.operator_norm_lazy(lz.bounded_transform_lazy(e.op))[0] < 1) == ra.bounded,
                   _lazy_payload(e), f"{e.name}: ||F|| < 1 iff bounded")


def _spectral_draw(rng, spec, t):
    n, _ = _dims(rng, spec)
    rank = int(rng.integers(0, n + 1)) if t % 2 else None
    return _hermitian(rng, n, rank) if t % 3 else _normal(rng, n, rank)


def _split_spectrum(A, ctx):
    lam = mo.spectrum(A)
    scale = max(np.abs(lam).max(), 1e-300)
    zero = np.abs(lam) <= 10 * ctx.rank_tol_for(A.shape) * scale
    return lam, zero


def _t6(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A = _spectral_draw(rng, spec, t)
        lam, zero = _split_spectrum(A, ctx)
        g = mo.moduli(A, ctx).gamma
        if zero.all():
            tr.require(math.isinf(g), _mat(A=A), "gamma of zero")
        else:
            tr.residual(abs(g - np.abs(lam[~zero]).min()), _mat(A=A), "gamma vs d(0, spectrum without 0)")
    for e in _catalog():
        if not e.real_diagonal:
            continue
        vals = np.abs(e.op.weights.values(20000))
        vals = vals[vals > 0]
        if not isinstance(e.op.weights.tail, lz.ZeroTail):
            vals = np.append(vals, abs(e.op.weights.tail_limit()))
        g = lz.moduli(e.op, ctx).gamma
        tr.residual(abs(g - vals.min()) if vals.size else float(not math.isinf(g)), _lazy_payload(e), f"{e.name} gamma")


def _t7(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A = _spectral_draw(rng, spec, t)
        lam, zero = _split_spectrum(A, ctx)
        m = mo.moduli(A, ctx).m
        d = 0.0 if zero.any() else np.abs(lam).min()
        tr.residual(abs(m - d), _mat(A=A), "m vs d(0, spectrum)")
        if not zero.any():
            inv_norm = np.linalg.norm(np.linalg.inv(A), 2)
            tr.residual(abs(m * inv_norm - 1.0), _mat(A=A), "m ||A^-1|| - 1")
    for e in _catalog():
        if not e.real_diagonal:
            continue
        vals = np.abs(e.op.weights.values(20000))
        d = min(vals.min(), abs(e.op.weights.tail_limit()))
        tr.residual(abs(lz.moduli(e.op, ctx).m - d), _lazy_payload(e), f"{e.name} m")


def _pair_draw(rng, spec, t):
    r, c = _dims(rng, spec)
    A = _rank_deficient(rng, r, c) if t % 3 == 1 else _gaussian(rng, r, c)
    B = _rank_deficient(rng, r, c) if t % 3 == 2 else _gaussian(rng, r, c)
    if t % 5 == 4:
        B = A + 10.0 ** rng.uniform(-6, -1) * _gaussian(rng, r, c)
    if t % 7 == 6:
        A, B = 5 * A, 0.2 * B
    return A, B


def _t8(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A, B = _pair_draw(rng, spec, t)
        d = me.gap_by_definition(A, B, ctx)
        f = me.gap_by_formula(A, B, ctx)
        tr.residual(abs(d - f), _mat(A=A, B=B), "definition vs formula")
        tr.residual(abs(d - me.gap_by_definition(B, A, ctx)), _mat(A=A, B=B), "symmetry")
        blocks = mo.graph_projection_blocks(A)
        tr.residual(mo.operator_norm(blocks - mo.graph_projection(A, ctx)), _mat(A=A), "block projection")


def _t9(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A, B = _pair_draw(rng, spec, t)
        theta = me.gap_by_definition(A, B, ctx)
        diff = mo.operator_norm(A - B)
        upper = math.sqrt(1 + mo.operator_norm(A) ** 2) * math.sqrt(1 + mo.operator_norm(B) ** 2) * theta
        tr.residual(max(0.0, theta - diff, diff - upper), _mat(A=A, B=B), "Nakamoto slack")
    for _ in range(max(1, spec.trials // 4)):
        r, c = _dims(rng, spec)
        A, B, C = (_gaussian(rng, r, c) for _ in range(3))
        tri = me.gap_by_definition(A, C, ctx) - me.gap_by_definition(A, B, ctx) - me.gap_by_definition(B, C, ctx)
        tr.residual(max(0.0, tri), _mat(A=A, B=B, C=C), "triangle inequality")


def _t10(rng, spec, ctx, tr):
    from .core import InvariantError

    for t in range(spec.trials):
        A, B = _pair_draw(rng, spec, t)
        if t % 4 == 1:
            n = A.shape[0]
            A, B = _gaussian(rng, n, n), _gaussian(rng, n, n)
        elif t % 4 == 2:
            r, c = A.shape
            P = _rank_deficient(rng, c, c)
            A, B = _gaussian(rng, r, c) @ P, _gaussian(rng, r, c) @ P
        try:
            rep = me.carrier_gap(A, B, ctx)
        except InvariantError as exc:
            tr.require(False, _mat(A=A, B=B), str(exc))
            continue
        tr.residual(max(0.0, abs(rep.eta - rep.null_gap) - rep.theta_definition), _mat(A=A, B=B), "lower sandwich")
        tr.residual(max(0.0, rep.theta_definition - rep.eta - rep.null_gap), _mat(A=A, B=B), "upper sandwich")
        same_null = mo.operator_norm(mo.null_projection(A, ctx) - mo.null_projection(B, ctx)) <= ctx.check_tol
        if same_null:
            tr.residual(abs(rep.eta - rep.theta_definition), _mat(A=A, B=B), "eta = theta when N(A) = N(B)")


def _section4_closed_form(n: int) -> float:
    return max(1.0, abs(n - 1) / math.sqrt(2)) / math.sqrt(1 + n * n)


def _t11(rng, spec, ctx, tr):
    for t in range(spec.trials):
        n_dim, _ = _dims(rng, spec)
        A = _hermitian(rng, n_dim, rank=int(rng.integers(0, n_dim + 1)))
        n = int(rng.integers(1, 6))
        direct, corrected = me.theta_nI_matrix(A, n, ctx)
        tr.residual(abs(direct - corrected), _mat(A=A), f"direct vs corrected (n={n})")
        lam = np.linalg.eigvalsh((A + A.conj().T) / 2)
        tr.residual(abs(corrected - me.theta_nI_spectral(lam, n)), _mat(A=A), "spectral sup")
    for n in (1, 2, 3, 4, 5):
        d, c = me.theta_nI_matrix(np.array([[-1.0 / n]]), n, ctx)
        tr.residual(abs(d - 1.0) + abs(c - 1.0), _mat(A=np.array([[-1.0 / n]])), "theta(-1/n, nI) = 1")
    T = LazyOperator.diagonal((), _index)
    N = ctx.truncation_dim
    trunc = lz.truncate(T, N)
    for n in (1, 2, 3, 4, 5):
        closed = lz.theta_nI_lazy(T, n, ctx)
        tr.residual(abs(closed - _section4_closed_form(n)), _ops(T=T), f"closed form n={n}")
        direct, corrected = me.theta_nI_matrix(trunc, n, ctx)
        tr.residual(abs(direct - corrected), _ops(T=T), f"truncation n={n}")
        # the truncation only misses the unattained limit 1: deficit <= (n + 1) / N
        deficit = closed - direct
        tr.require(-ctx.check_tol <= deficit <= (n + 1) / N / math.sqrt(1 + n * n) + ctx.check_tol,
                   _ops(T=T), f"truncation deficit {deficit:.3e} at n={n}")


def _t12(rng, spec, ctx, tr):
    for e in _catalog():
        rep = lz.moduli(e.op, ctx)
        tr.require(not rep.attains_reduced_min or rep.attains_min, _lazy_payload(e), f"{e.name}")
        tr.require(not rep.attains_reduced_min or rep.closed_range, _lazy_payload(e), f"{e.name} closed range")
    for t in range(min(spec.trials, 50)):
        A = _draw(rng, spec, t)
        rep = mo.moduli(A, ctx)
        tr.residual(abs(np.linalg.norm(A @ rep.min_witness) - rep.m), _mat(A=A), "min witness")


def _t13(rng, spec, ctx, tr):
    for e in _catalog():
        r, ra = lz.moduli(e.op, ctx), lz.moduli(lz.adjoint(e.op), ctx)
        tr.require(r.attains_reduced_min == ra.attains_reduced_min, _lazy_payload(e), f"{e.name} attainment")
        tr.require(r.gamma == ra.gamma or abs(r.gamma - ra.gamma) <= ctx.check_tol, _lazy_payload(e), e.name)
        tr.require(lz.adjoint(lz.adjoint(e.op)) == e.op, _lazy_payload(e), f"{e.name} involution")
    R = LazyOperator.forward_shift((), _inv_n)
    tr.require(not lz.moduli(R, ctx).attains_min and lz.moduli(lz.adjoint(R), ctx).attains_min,
               _ops(T=R), "minimum attainment should not be adjoint-invariant")
    for t in range(min(spec.trials, 50)):
        A = _draw(rng, spec, t)
        g, ga = mo.moduli(A, ctx).gamma, mo.moduli(A.conj().T, ctx).gamma
        tr.residual(0.0 if g == ga else abs(g - ga), _mat(A=A), "gamma(A) vs gamma(A*)")


def _t14(rng, spec, ctx, tr):
    for e in _catalog():
        base = lz.moduli(e.op, ctx).attains_reduced_min
        for label, other in (("T*T", e.gram), ("|T|", e.modulus)):
            if other is not None:
                tr.require(lz.moduli(other, ctx).attains_reduced_min == base, _lazy_payload(e), f"{e.name} vs {label}")
    for t in range(min(spec.trials, 50)):
        A = _draw(rng, spec, t)
        rep = mo.moduli(A, ctx)
        for M in (A.conj().T @ A, mo.absolute_value(A, ctx)):
            tr.require(mo.moduli(M, ctx).attains_reduced_min == rep.attains_reduced_min, _mat(A=A), "matrix smoke")


def _t15(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A = _draw(rng, spec, t)
        lhs = mo.pinv(A.conj().T @ A, ctx)
        P = mo.pinv(A, ctx)
        rhs = P @ mo.pinv(A.conj().T, ctx)
        scale = max(1.0, mo.operator_norm(lhs))
        tr.residual(mo.operator_norm(lhs - rhs) / scale, _mat(A=A), "(A*A)+ = A+ A*+")
        tr.residual(mo.operator_norm(mo.pinv(P, ctx) - A) / max(1.0, mo.operator_norm(A)), _mat(A=A), "A++ = A")
        tr.residual(mo.operator_norm(mo.pinv(A.conj().T, ctx) - P.conj().T) / scale, _mat(A=A), "A*+ = A+*")
        # A A+ and A+ A are the orthogonal projections on R(A) and N(A)-perp
        for M in (A @ P, P @ A):
            tr.residual(mo.operator_norm(M - M.conj().T) + mo.operator_norm(M @ M - M), _mat(A=A), "projection")


def _t16(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A = _draw(rng, spec, t) * 10.0 ** rng.uniform(-2, 2)
        r, c = A.shape
        Tc = np.linalg.inv(np.eye(c) + A.conj().T @ A)
        Th = np.linalg.inv(np.eye(r) + A @ A.conj().T)
        tr.residual(max(0.0, mo.operator_norm(A @ Tc) - 0.5), _mat(A=A), "||T Ť|| <= 1/2")
        tr.residual(max(0.0, mo.operator_norm(A.conj().T @ Th) - 0.5), _mat(A=A), "||T* T̂|| <= 1/2")
        tr.residual(mo.operator_norm(Th @ A - A @ Tc), _mat(A=A), "T̂ T = T Ť")


def _t17(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A, B = _pair_draw(rng, spec, t)
        if t % 2:
            n = A.shape[0]
            A, B = _hermitian(rng, n), _hermitian(rng, n)
        d = me.gap_by_definition(A, B, ctx)
        s = me.gap_same_domain(A, B, ctx)
        tr.residual(abs(d - s), _mat(A=A, B=B), "same-domain formula")
        tr.residual(max(0.0, s - mo.operator_norm(A - B)), _mat(A=A, B=B), "theta <= ||A - B||")


def _t18(rng, spec, ctx, tr):
    depth = ctx.tail_probe_depth
    for e in _catalog():
        if not e.real_diagonal:
            continue
        rep = lz.moduli(e.op, ctx)
        g = rep.gamma
        w = e.op.weights
        entries = list(w.prefix)
        t = w.tail
        if isinstance(t, ConstantTail):
            entries.append(t.value)
        elif isinstance(t, FormulaTail):
            entries.extend(t(np.arange(w.start, w.start + depth, dtype=float)))
        is_eigen = any(complex(x).real in (g, -g) for x in entries if x != 0)
        tr.require(rep.attains_reduced_min == is_eigen, _lazy_payload(e), f"{e.name}: +-gamma eigenvalue test")
    for t in range(min(spec.trials, 50)):
        n, _ = _dims(rng, spec)
        A = _hermitian(rng, n, rank=int(rng.integers(1, n + 1)))
        g = mo.moduli(A, ctx).gamma
        lam = np.linalg.eigvalsh(A)
        tr.residual(min(np.abs(lam - g).min(), np.abs(lam + g).min()), _mat(A=A), "gamma or -gamma eigenvalue")


def _t19(rng, spec, ctx, tr):
    for e in _catalog():
        F = lz.bounded_transform_lazy(e.op, ctx)
        tr.require(lz.moduli(F, ctx).attains_reduced_min == lz.moduli(e.op, ctx).attains_reduced_min,
                   _lazy_payload(e), f"{e.name}: attainment under bounded transform")
    for t in range(min(spec.trials, 50)):
        A = _draw(rng, spec, t)
        F = mo.bounded_transform(A, ctx)
        rep = mo.moduli(F, ctx)
        if rep.attains_reduced_min:
            tr.residual(abs(np.linalg.norm(F @ rep.gamma_witness) - rep.gamma), _mat(A=A), "F witness")


_PERTURB_CASES = (
    ("diag(1+1/n)", LazyOperator.diagonal((), _one_plus)),
    ("diag(1/n)", LazyOperator.diagonal((), _inv_n)),
    ("diag([0, 3], 2+1/n)", LazyOperator.diagonal([0, 3], _two_plus)),
    ("diag([0, 0.01, 0], 1/n^2)", LazyOperator.diagonal([0, 0.01, 0], _inv_n2)),
    ("diag([1], 2)", LazyOperator.diagonal([1], ConstantTail(2))),
)


def _t20(rng, spec, ctx, tr):
    for name, L in _PERTURB_CASES:
        g0 = lz.moduli(L, ctx).gamma
        for eps in (0.5, 0.1, 0.01):
            S, Lp, cert = lz.perturb_to_attain(L, eps, ctx)
            payload = _ops(T=L, S=S)
            s_norm, _, _ = lz.seq_modulus_sup(S.weights, ctx)
            tr.require(s_norm <= eps, payload, f"{name}, eps={eps}: ||S|| = {s_norm} > eps")
            tr.require(lz.null_set(Lp) == lz.null_set(L), payload, f"{name}, eps={eps}: null space changed")
            tr.require(lz.moduli(Lp, ctx).attains_reduced_min, payload, f"{name}, eps={eps}: T+S does not attain")
            count = max(len(Lp.weights.prefix), len(S.weights.prefix)) + 500
            sums = L.weights.values(count) + S.weights.values(count)
            tr.residual(np.abs(sums - Lp.weights.values(count)).max(), payload, "T + S")
            if g0 > 0:
                support = np.count_nonzero(S.weights.values(count))
                tail_zero = isinstance(S.weights.tail, lz.ZeroTail)
                tr.require(support <= 1 and tail_zero, payload, f"{name}, eps={eps}: S not rank one")


def _t21(rng, spec, ctx, tr):
    for t in range(spec.trials):
        A = _draw(rng, spec, t)
        r, ra = mo.moduli(A, ctx), mo.moduli(mo.absolute_value(A, ctx), ctx)
        tr.residual(abs(r.m - ra.m), _mat(A=A), "m(|A|)")
        tr.residual(0.0 if r.gamma == ra.gamma else abs(r.gamma - ra.gamma), _mat(A=A), "gamma(|A|)")
        V, Abs = mo.polar(A, ctx)
        tr.residual(mo.operator_norm(V @ Abs - A), _mat(A=A), "A = V|A|")
    for e in _catalog():
        if e.modulus is None:
            continue
        r, ra = lz.moduli(e.op, ctx), lz.moduli(e.modulus, ctx)
        tr.require((r.m, r.gamma, r.attains_min) == (ra.m, ra.gamma, ra.attains_min), _lazy_payload(e), e.name)


def _t22(rng, spec, ctx, tr):
    # orthogonal projections attain their reduced minimum, which is 1
    for t in range(min(spec.trials, 50)):
        n, _ = _dims(rng, spec)
        Q = _unitary(rng, n)[:, : int(rng.integers(1, n + 1))]
        P = Q @ Q.conj().T
        rep = mo.moduli(P, ctx)
        tr.residual(abs(rep.gamma - 1.0), _mat(P=P), "projection gamma")
    T = np.diag([0.0, 0.5, 1.0])
    rep = mo.moduli(T, ctx)
    tr.residual(abs(rep.m) + abs(rep.gamma - 0.5), _mat(T=T), "diag(0, 1/2, 1) moduli")
    ext = mo.hull_extreme_points(mo.numerical_range_boundary(T, 360))
    tr.residual(abs(ext.real.min()) + abs(ext.real.max() - 1) + np.abs(ext.imag).max(), _mat(T=T), "W(T) = [0, 1]")
    tr.require(np.abs(ext - 0.5).min() >= 0.49, _mat(T=T), "1/2 is not an extreme point")
    R = LazyOperator.forward_shift((), _inv_n)
    r, ra = lz.moduli(R, ctx), lz.moduli(lz.adjoint(R), ctx)
    tr.require(r.m == 0 and not r.attains_min and not r.closed_range, _ops(T=R), "shifted diag(1/n): T")
    tr.require(ra.m == 0 and ra.attains_min and ra.min_witness == 1, _ops(T=R), "shifted diag(1/n): T*")
    Tm = LazyOperator.diagonal((), _index)
    for n in (1, 2, 3, 4, 5):
        tr.residual(abs(lz.theta_nI_lazy(Tm, n, ctx) - _section4_closed_form(n)), _ops(T=Tm), f"theta(T, {n}I)")


CHECKS = {
    "T1": ("T attains gamma iff pinv is bounded and attains its norm", "both", _t1),
    "T2": ("||pinv(T)|| = 1/gamma(T)", "both", _t2),
    "T3": ("gamma(T*T) = gamma(T)^2", "both", _t3),
    "T4": ("m(T*T) = m(T)^2", "both", _t4),
    "T5": ("bounded transform maps m and gamma by x/sqrt(1+x^2)", "both", _t5),
    "T6": ("self-adjoint/normal gamma = d(0, spectrum minus 0)", "both", _t6),
    "T7": ("self-adjoint/normal m = d(0, spectrum)", "both", _t7),
    "T8": ("gap formula equals gap by definition", "matrix", _t8),
    "T9": ("Nakamoto inequalities", "matrix", _t9),
    "T10": ("carrier-graph sandwich", "matrix", _t10),
    "T11": ("corrected theta(T, nI)", "both", _t11),
    "T12": ("reduced-minimum attaining implies minimum attaining", "lazy", _t12),
    "T13": ("attainment is adjoint invariant", "lazy", _t13),
    "T14": ("attainment for T, T*T and |T| agree", "lazy", _t14),
    "T15": ("pseudoinverse identities", "matrix", _t15),
    "T16": ("||T (I + T*T)^-1|| <= 1/2", "matrix", _t16),
    "T17": ("same-domain gap formula and theta <= ||S - T||", "matrix", _t17),
    "T18": ("self-adjoint attainment iff +-gamma is an eigenvalue", "lazy", _t18),
    "T19": ("attainment preserved by the bounded transform", "lazy", _t19),
    "T20": ("epsilon perturbation to an attaining operator", "lazy", _t20),
    "T21": ("m and gamma of |T|", "both", _t21),
    "T22": ("worked examples", "both", _t22),
}

_GAP_CHECKS = {"T8", "T9", "T10", "T17"}


def default_spec(check_id: str, seed: int = 0, trials: Optional[int] = None, max_dim: Optional[int] = None) -> CheckSpec:
    if check_id not in CHECKS:
        raise KeyError(f"unknown check id {check_id!r}")
    desc, backend, _ = CHECKS[check_id]
    hi = max_dim if max_dim is not None else (6 if check_id in _GAP_CHECKS else 8)
    return CheckSpec(check_id, desc, backend, trials or 200, (1, hi), seed)


def run_check(spec: CheckSpec, ctx: Optional[ToleranceContext] = None) -> CheckResult:
    if spec.id not in CHECKS:
        raise KeyError(f"unknown check id {spec.id!r}")
    ctx = resolve_context(ctx)
    desc, _, fn = CHECKS[spec.id]
    rng = np.random.default_rng([spec.seed, int(spec.id[1:])])
    tr = _Tracker(ctx.check_tol)
    try:
        fn(rng, spec, ctx, tr)
    except Exception as exc:  # a crash is a failed check, reported as data
        tr.require(False, lambda: {}, f"{type(exc).__name__}: {exc}")
    payload, msg = tr.failure if tr.failure else (None, "")
    return CheckResult(spec.id, spec.description or desc, tr.failure is None, tr.worst, tr.count, payload, msg)


def run_all(
    ctx: Optional[ToleranceContext] = None,
    seed: int = 0,
    trials: Optional[int] = None,
    max_dim: Optional[int] = None,
    ids=None,
    workers: int = 1,
) -> VerificationReport:
    ctx = resolve_context(ctx)
    ids = list(ids) if ids else list(CHECKS)
    specs = [default_spec(i, seed, trials, max_dim) for i in ids]
    start = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: run_check(s, ctx), specs))
    else:
        results = [run_check(s, ctx) for s in specs]
    return VerificationReport(results, time.perf_counter() - start)
