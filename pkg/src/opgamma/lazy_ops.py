"""Diagonal and weighted-shift operators on l2 given by symbolic weight sequences.

A weight sequence is an explicit prefix ``w_1..w_P`` followed by a tail that
is zero, constant, or a strictly monotone real rational function of the index.
Infima, suprema and attainment are decided from that structure: a strictly
monotone tail never reaches its limit, a constant tail always does. This is
what lets the backend represent non-closed ranges and infima that are not
attained, which no matrix can exhibit.

Kinds (indices start at 1)::

    diagonal        T e_n = w_n e_n
    forward_shift   T e_n = w_n e_{n+1}
    backward_shift  T e_1 = 0,  T e_{n+1} = conj(w_n) e_n
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P

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
    "ZeroTail",
    "ConstantTail",
    "FormulaTail",
    "SequenceSpec",
    "Kind",
    "LazyOperator",
    "NullSet",
    "PerturbationCertificate",
    "UnsupportedFamilyError",
    "InconsistentTailError",
    "MAX_TRUNCATION",
    "MAX_MATERIALIZE",
    "seq_modulus_inf",
    "seq_modulus_sup",
    "moduli",
    "adjoint",
    "pinv_lazy",
    "bounded_transform_lazy",
    "theta_nI_lazy",
    "gap_lazy_diag",
    "perturb_to_attain",
    "truncate",
    "null_set",
]

MAX_TRUNCATION = 4096
MAX_MATERIALIZE = 1_000_000
_SEARCH_LIMIT = 10**15


class InconsistentTailError(ValidationError):
    """A formula tail contradicts its declared limit or direction."""


class UnsupportedFamilyError(PreconditionError):
    """The operation is not available for this kind of operator."""


# ---------------------------------------------------------------------------
# tails


@dataclass(frozen=True)
class ZeroTail:
    pass


@dataclass(frozen=True)
class ConstantTail:
    value: complex


def _map_scalar(op, x: float, sign: float) -> float:
    name = op[0]
    if name == "bounded":
        if math.isinf(x):
            return math.copysign(1.0, x)
        return x / math.sqrt(1.0 + x * x)
    if name == "reciprocal":
        if math.isinf(x):
            return 0.0
        if x == 0:
            return math.copysign(INF, sign)
        return 1.0 / x
    if name == "affine":
        a, b = op[1], op[2]
        if math.isinf(x):
            return math.copysign(INF, b * x) if b != 0 else a
        return a + b * x
    raise ValidationError(f"unknown tail map {op!r}")


def _map_array(op, x: np.ndarray) -> np.ndarray:
    name = op[0]
    if name == "bounded":
        return x / np.sqrt(1.0 + x * x)
    if name == "reciprocal":
        return 1.0 / x
    if name == "affine":
        return op[1] + op[2] * x
    raise ValidationError(f"unknown tail map {op!r}")


@dataclass(frozen=True)
class FormulaTail:
    """Real rational function ``num(n)/den(n)`` of the index, optionally post-composed.

    ``num``/``den`` hold ascending coefficients. ``maps`` is a chain of
    ``("bounded",)``, ``("reciprocal",)`` or ``("affine", a, b)`` applied in
    order. ``limit`` is the signed limit of the final value and ``direction``
    describes ``|value|``.
    """

    num: tuple
    den: tuple
    limit: float
    direction: str
    maps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(float(c) for c in self.num))
        object.__setattr__(self, "den", tuple(float(c) for c in self.den))
        object.__setattr__(self, "limit", float(self.limit))
        object.__setattr__(self, "maps", tuple(tuple(m) for m in self.maps))
        if self.direction not in ("decreasing", "increasing"):
            raise ValidationError(f"direction must be 'decreasing' or 'increasing', got {self.direction!r}")
        if not any(self.den):
            raise ValidationError("formula denominator is identically zero")

    def __call__(self, n):
        x = np.asarray(n, dtype=float)
        val = P.polyval(x, self.num) / P.polyval(x, self.den)
        for op in self.maps:
            val = _map_array(op, val)
        return val

    def at(self, n: int) -> float:
        return float(self(float(n)))

    def rational_limit(self) -> float:
        """Exact limit of the unmapped rational function."""
        num = np.trim_zeros(np.array(self.num), "b")
        den = np.trim_zeros(np.array(self.den), "b")
        if num.size == 0:
            return 0.0
        dn, dd = num.size - 1, den.size - 1
        if dn < dd:
            return 0.0
        if dn == dd:
            return float(num[-1] / den[-1])
        return math.copysign(INF, num[-1] / den[-1])

    def mapped(self, op, start: int) -> "FormulaTail":
        """Compose with one more map, deriving the new limit and direction."""
        first = self.at(start)
        sign = math.copysign(1.0, first)
        new_limit = _map_scalar(op, self.limit, sign)
        new_first = _map_array(op, np.array(first))
        new_dir = "increasing" if abs(float(new_first)) < abs(new_limit) else "decreasing"
        return FormulaTail(self.num, self.den, new_limit, new_dir, self.maps + (tuple(op),))


Tail = Union[ZeroTail, ConstantTail, FormulaTail]


def _real_roots(coeffs) -> np.ndarray:
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return np.array([])
    r = P.polyroots(c)
    return r[np.abs(r.imag) <= 1e-9 * np.maximum(1.0, np.abs(r.real))].real


def _validate_formula(tail: FormulaTail, start: int, depth: int) -> None:
    idx = np.arange(start, start + depth, dtype=float)
    den_vals = P.polyval(idx, tail.den)
    if np.any(den_vals == 0):
        raise InconsistentTailError("formula denominator vanishes inside the tail")
    vals = tail(idx)
    if not np.all(np.isfinite(vals)):
        raise InconsistentTailError("formula tail produced non-finite values")
    if np.any(vals == 0):
        raise InconsistentTailError("formula tails may not contain zero weights; put them in the prefix")
    if not (np.all(vals > 0) or np.all(vals < 0)):
        raise InconsistentTailError("formula tail changes sign")
    mods = np.abs(vals)
    steps = np.diff(mods)
    lim = abs(tail.limit)
    if tail.direction == "decreasing":
        if not np.all(steps < 0):
            raise InconsistentTailError("sampled |w_n| is not strictly decreasing")
        if math.isinf(lim) or not np.all(mods > lim):
            raise InconsistentTailError("decreasing tail must stay above a finite limit")
    else:
        if not np.all(steps > 0):
            raise InconsistentTailError("sampled |w_n| is not strictly increasing")
        if not np.all(mods < lim):
            raise InconsistentTailError("increasing tail must stay below its limit")
    if tail.limit != 0 and not math.isinf(tail.limit) and np.sign(tail.limit) != np.sign(vals[0]):
        raise InconsistentTailError("tail limit has the opposite sign of the tail values")
    last = start + depth - 1
    # turning points beyond the sampled window would be invisible to sampling
    dnum = P.polysub(P.polymul(P.polyder(tail.num), tail.den), P.polymul(tail.num, P.polyder(tail.den)))
    for label, coeffs in (("numerator", tail.num), ("denominator", tail.den), ("derivative", dnum)):
        late = _real_roots(coeffs)
        if np.any(late > last):
            raise InconsistentTailError(f"{label} has a real root beyond the probe window at n={late.max():.6g}")
    if not tail.maps:
        exact = tail.rational_limit()
        if math.isinf(exact) or math.isinf(tail.limit):
            ok = math.isinf(exact) and math.isinf(tail.limit)
        else:
            ok = abs(exact - tail.limit) <= 1e-12 * max(1.0, abs(exact))
        if not ok:
            raise InconsistentTailError(f"declared limit {tail.limit} but the formula tends to {exact}")


@dataclass(frozen=True)
class SequenceSpec:
    """Weights ``w_1, w_2, ...``: explicit prefix then a tail for ``n > len(prefix)``."""

    prefix: tuple = ()
    tail: Tail = field(default_factory=ZeroTail)

    def __post_init__(self):
        pre = tuple(complex(w) for w in self.prefix)
        if not all(math.isfinite(w.real) and math.isfinite(w.imag) for w in pre):
            raise ValidationError("prefix weights must be finite")
        object.__setattr__(self, "prefix", pre)
        if isinstance(self.tail, ConstantTail):
            object.__setattr__(self, "tail", ConstantTail(complex(self.tail.value)))

    @property
    def start(self) -> int:
        """First index governed by the tail."""
        return len(self.prefix) + 1

    def __getitem__(self, n: int) -> complex:
        if n < 1:
            raise IndexError(n)
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        t = self.tail
        if isinstance(t, ZeroTail):
            return 0j
        if isinstance(t, ConstantTail):
            return t.value
        return complex(t.at(n))

    def values(self, count: int) -> np.ndarray:
        out = np.zeros(count, dtype=complex)
        k = min(count, len(self.prefix))
        out[:k] = self.prefix[:k]
        if count > k:
            t = self.tail
            if isinstance(t, ConstantTail):
                out[k:] = t.value
            elif isinstance(t, FormulaTail):
                out[k:] = t(np.arange(k + 1, count + 1, dtype=float))
        return out

    def tail_limit(self) -> complex:
        t = self.tail
        if isinstance(t, ZeroTail):
            return 0j
        if isinstance(t, ConstantTail):
            return t.value
        return t.limit

    def is_real(self) -> bool:
        if any(w.imag != 0 for w in self.prefix):
            return False
        return not (isinstance(self.tail, ConstantTail) and self.tail.value.imag != 0)

    def validate(self, ctx: Optional[ToleranceContext] = None) -> "SequenceSpec":
        ctx = resolve_context(ctx)
        if isinstance(self.tail, FormulaTail):
            _validate_formula(self.tail, self.start, ctx.tail_probe_depth)
        elif not isinstance(self.tail, (ZeroTail, ConstantTail)):
            raise ValidationError(f"unknown tail {self.tail!r}")
        return self


def _first_index(pred, start: int) -> Optional[int]:
    """Smallest ``n >= start`` with ``pred(n)`` for a predicate monotone in ``n``."""
    if pred(start):
        return start
    lo, step = start, 1
    while True:
        hi = start + step
        if hi > _SEARCH_LIMIT:
            return None
        if pred(hi):
            break
        lo, step = hi, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# sequence infima and suprema


def seq_modulus_inf(s: SequenceSpec, exclude_zero: bool, ctx: Optional[ToleranceContext] = None):
    """``inf |w_n|`` as ``(value, attained, witness_index)``.

    With ``exclude_zero`` the infimum runs over the support only; an empty
    index set gives ``(inf, False, None)``.
    """
    s.validate(ctx)
    best, where = INF, None
    for i, w in enumerate(s.prefix, start=1):
        a = abs(w)
        if exclude_zero and a == 0:
            continue
        if a < best:
            best, where = a, i
    t = s.tail
    tail_val, tail_idx = INF, None
    if isinstance(t, ZeroTail) or (isinstance(t, ConstantTail) and t.value == 0):
        if not exclude_zero:
            tail_val, tail_idx = 0.0, s.start
    elif isinstance(t, ConstantTail):
        tail_val, tail_idx = abs(t.value), s.start
    elif t.direction == "increasing":
        tail_val, tail_idx = abs(t.at(s.start)), s.start
    else:
        tail_val, tail_idx = abs(t.limit), None
    if tail_val < best or (tail_val == best and where is None):
        best, where = tail_val, tail_idx
    if math.isinf(best):
        return INF, False, None
    return best, where is not None, where


def seq_modulus_sup(s: SequenceSpec, ctx: Optional[ToleranceContext] = None):
    """``sup |w_n|`` as ``(value, attained, witness_index)``; ``(0, True, 1)`` never empty."""
    s.validate(ctx)
    best, where = -1.0, None
    for i, w in enumerate(s.prefix, start=1):
        if abs(w) > best:
            best, where = abs(w), i
    t = s.tail
    if isinstance(t, ZeroTail):
        tail_val, tail_idx = 0.0, s.start
    elif isinstance(t, ConstantTail):
        tail_val, tail_idx = abs(t.value), s.start
    elif t.direction == "decreasing":
        tail_val, tail_idx = abs(t.at(s.start)), s.start
    else:
        tail_val, tail_idx = abs(t.limit), None
    if tail_val > best:
        best, where = tail_val, tail_idx
    return best, where is not None, where


# ---------------------------------------------------------------------------
# operators


class Kind(str, Enum):
    DIAGONAL = "diagonal"
    FORWARD_SHIFT = "forward_shift"
    BACKWARD_SHIFT = "backward_shift"


@dataclass(frozen=True)
class LazyOperator:
    kind: Kind
    weights: SequenceSpec

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not isinstance(self.weights, SequenceSpec):
            raise ValidationError("weights must be a SequenceSpec")

    @classmethod
    def diagonal(cls, prefix=(), tail=None) -> "LazyOperator":
        return cls(Kind.DIAGONAL, SequenceSpec(tuple(prefix), tail or ZeroTail()))

    @classmethod
    def forward_shift(cls, prefix=(), tail=None) -> "LazyOperator":
        return cls(Kind.FORWARD_SHIFT, SequenceSpec(tuple(prefix), tail or ZeroTail()))

    @classmethod
    def backward_shift(cls, prefix=(), tail=None) -> "LazyOperator":
        return cls(Kind.BACKWARD_SHIFT, SequenceSpec(tuple(prefix), tail or ZeroTail()))

    def validate(self, ctx=None) -> "LazyOperator":
        self.weights.validate(ctx)
        return self


def moduli(L: LazyOperator, ctx: Optional[ToleranceContext] = None) -> ModulusReport:
    """Modulus report from sequence analysis of the weights.

    For every kind ``||Tx||^2 = sum |w_n x_n|^2`` over the acting coordinates,
    so both infima reduce to :func:`seq_modulus_inf`. Witnesses are 1-based
    basis indices.
    """
    ctx = resolve_context(ctx)
    w = L.weights
    if L.kind is Kind.BACKWARD_SHIFT:
        m, m_att, m_idx = 0.0, True, 1
        g, g_att, g_idx = seq_modulus_inf(w, True, ctx)
        if g_idx is not None:
            g_idx += 1
    else:
        m, m_att, m_idx = seq_modulus_inf(w, False, ctx)
        g, g_att, g_idx = seq_modulus_inf(w, True, ctx)
    sup, _, _ = seq_modulus_sup(w, ctx)
    return ModulusReport(
        m=m,
        gamma=g,
        attains_min=m_att,
        attains_reduced_min=g_att,
        closed_range=g > 0,
        bounded=math.isfinite(sup),
        pinv_norm=reciprocal(g),
        min_witness=m_idx,
        gamma_witness=g_idx,
    ).validate()


def operator_norm_lazy(L: LazyOperator, ctx=None):
    """``(norm, attained, witness_index)``; for every kind this is ``sup |w_n|``."""
    val, att, idx = seq_modulus_sup(L.weights, ctx)
    if idx is not None and L.kind is Kind.BACKWARD_SHIFT:
        idx += 1
    return val, att, idx


def _map_weights(s: SequenceSpec, scalar, formula_op) -> SequenceSpec:
    prefix = tuple(scalar(w) for w in s.prefix)
    t = s.tail
    if isinstance(t, ZeroTail):
        tail = ZeroTail()
    elif isinstance(t, ConstantTail):
        tail = ConstantTail(scalar(t.value))
        if tail.value == 0:
            tail = ZeroTail()
    elif formula_op is None:
        tail = t
    else:
        tail = t.mapped(formula_op, s.start)
    return SequenceSpec(prefix, tail)


def adjoint(L: LazyOperator) -> LazyOperator:
    if L.kind is Kind.DIAGONAL:
        return LazyOperator(Kind.DIAGONAL, _map_weights(L.weights, lambda w: w.conjugate(), None))
    other = Kind.BACKWARD_SHIFT if L.kind is Kind.FORWARD_SHIFT else Kind.FORWARD_SHIFT
    return LazyOperator(other, L.weights)


def pinv_lazy(L: LazyOperator, ctx: Optional[ToleranceContext] = None) -> LazyOperator:
    """Moore-Penrose inverse; needs ``gamma(L) > 0`` so that it is bounded."""
    rep = moduli(L, ctx)
    if rep.gamma == 0:
        raise PreconditionError("gamma = 0: range is not closed and the pseudoinverse is unbounded")
    if L.kind is Kind.DIAGONAL:
        inv = lambda w: 0j if w == 0 else 1 / w  # noqa: E731
        return LazyOperator(Kind.DIAGONAL, _map_weights(L.weights, inv, ("reciprocal",)))
    inv = lambda w: 0j if w == 0 else 1 / w.conjugate()  # noqa: E731
    other = Kind.BACKWARD_SHIFT if L.kind is Kind.FORWARD_SHIFT else Kind.FORWARD_SHIFT
    return LazyOperator(other, _map_weights(L.weights, inv, ("reciprocal",)))


def bounded_transform_lazy(L: LazyOperator, ctx: Optional[ToleranceContext] = None) -> LazyOperator:
    """Same kind with weights ``w / sqrt(1 + |w|^2)``."""
    L.validate(ctx)
    f = lambda w: w / math.sqrt(1.0 + abs(w) ** 2)  # noqa: E731
    return LazyOperator(L.kind, _map_weights(L.weights, f, ("bounded",)))


def truncate(L: LazyOperator, N: int) -> np.ndarray:
    """Upper-left ``N x N`` corner of the matrix of ``L``."""
    if not 1 <= N <= MAX_TRUNCATION:
        raise ValidationError(f"truncation size must be in [1, {MAX_TRUNCATION}], got {N}")
    w = L.weights.values(N)
    M = np.zeros((N, N), dtype=complex)
    if L.kind is Kind.DIAGONAL:
        M[np.arange(N), np.arange(N)] = w
    elif L.kind is Kind.FORWARD_SHIFT:
        M[np.arange(1, N), np.arange(N - 1)] = w[: N - 1]
    else:
        M[np.arange(N - 1), np.arange(1, N)] = w[: N - 1].conj()
    return M


@dataclass(frozen=True)
class NullSet:
    """Indices ``n`` with ``e_n`` in the null space: a finite set plus ``[from_index, inf)``."""

    finite: frozenset
    from_index: Optional[int]


def null_set(L: LazyOperator) -> NullSet:
    w = L.weights
    offset = 1 if L.kind is Kind.BACKWARD_SHIFT else 0
    zeros = {i + offset for i, v in enumerate(w.prefix, start=1) if v == 0}
    t = w.tail
    tail_zero = isinstance(t, ZeroTail) or (isinstance(t, ConstantTail) and t.value == 0)
    start = w.start + offset if tail_zero else None
    if start is not None:
        while start - 1 in zeros:
            start -= 1
            zeros.discard(start)
        zeros = {i for i in zeros if i < start}
    if offset:
        zeros.add(1)
        if start == 2:
            zeros.discard(1)
            start = 1
    return NullSet(frozenset(zeros), start)


# ---------------------------------------------------------------------------
# gap formulas for diagonal operators


def _require_real_diagonal(L: LazyOperator) -> None:
    if L.kind is not Kind.DIAGONAL:
        raise ValidationError("expected a diagonal operator")
    if not L.weights.is_real():
        raise ValidationError("expected real weights")


def _dist_to_nI(x: float, n: float) -> float:
    if math.isinf(x):
        return 1.0
    return abs(x - n) / math.sqrt(1.0 + x * x)


def theta_nI_lazy(L: LazyOperator, n: float, ctx: Optional[ToleranceContext] = None) -> float:
    """Gap between a real self-adjoint diagonal operator and ``nI``.

    Supremum of ``|x - n| / sqrt(1 + x^2)`` over the weights, divided by
    ``sqrt(1 + n^2)``. Over a monotone formula tail the supremum is decided
    exactly: the function rises up to ``x = -1/n`` and falls to zero at
    ``x = n`` before rising towards 1, so it suffices to look at the tail
    endpoints, the limit, and the two tail values bracketing ``-1/n``.
    """
    ctx = resolve_context(ctx)
    _require_real_diagonal(L)
    s = L.weights.validate(ctx)
    cands = [_dist_to_nI(w.real, n) for w in s.prefix]
    t = s.tail
    if isinstance(t, ZeroTail):
        cands.append(_dist_to_nI(0.0, n))
    elif isinstance(t, ConstantTail):
        cands.append(_dist_to_nI(t.value.real, n))
    else:
        idx = np.arange(s.start, s.start + ctx.tail_probe_depth, dtype=float)
        cands.extend(np.abs(t(idx) - n) / np.sqrt(1.0 + t(idx) ** 2))
        first = t.at(s.start)
        cands.append(_dist_to_nI(t.limit, n))
        peak = -1.0 / n if n != 0 else None
        if peak is not None and min(first, t.limit) < peak < max(first, t.limit):
            rising = first < t.limit
            k = _first_index(lambda j: (t.at(j) >= peak) if rising else (t.at(j) <= peak), s.start)
            if k is not None:
                cands.append(_dist_to_nI(t.at(k), n))
                if k > s.start:
                    cands.append(_dist_to_nI(t.at(k - 1), n))
    return float(max(cands)) / math.sqrt(1.0 + n * n)


def _scalar_gap(a: complex, b: complex) -> float:
    ainf, binf = math.isinf(abs(a)), math.isinf(abs(b))
    if ainf and binf:
        return 0.0
    if ainf:
        return 1.0 / math.sqrt(1.0 + abs(b) ** 2)
    if binf:
        return 1.0 / math.sqrt(1.0 + abs(a) ** 2)
    return abs(a - b) / (math.sqrt(1.0 + abs(a) ** 2) * math.sqrt(1.0 + abs(b) ** 2))


def gap_lazy_diag(L1: LazyOperator, L2: LazyOperator, ctx: Optional[ToleranceContext] = None) -> float:
    """Gap between two diagonal operators.

    The graphs split into the coordinate planes spanned by ``(e_n, a_n e_n)``,
    so the gap is the supremum of the scalar line gaps. The tail supremum is
    sampled (``tail_probe_depth`` dense terms, then log-spaced up to 1e9) and
    combined with the contribution of the tail limits.
    """
    ctx = resolve_context(ctx)
    for L in (L1, L2):
        if L.kind is not Kind.DIAGONAL:
            raise ValidationError("gap_lazy_diag needs two diagonal operators")
        L.validate(ctx)
    a, b = L1.weights, L2.weights
    K = max(len(a.prefix), len(b.prefix))
    dense = np.arange(1, K + ctx.tail_probe_depth + 1)
    sparse = np.unique(np.logspace(np.log10(K + ctx.tail_probe_depth + 1), 9, 200).astype(np.int64))
    best = 0.0
    for idx in (dense, sparse):
        va = np.array([a[int(i)] for i in idx])
        vb = np.array([b[int(i)] for i in idx])
        g = np.abs(va - vb) / (np.sqrt(1 + np.abs(va) ** 2) * np.sqrt(1 + np.abs(vb) ** 2))
        best = max(best, float(g.max()))
    return max(best, _scalar_gap(a.tail_limit(), b.tail_limit()))


# ---------------------------------------------------------------------------
# perturbation to a reduced-minimum-attaining operator


@dataclass(frozen=True)
class PerturbationCertificate:
    s_norm: float
    new_gamma: float
    witness_index: Optional[int]
    rank_one: bool
    branch: str

    def to_dict(self) -> dict:
        return {
            "s_norm": self.s_norm,
            "new_gamma": self.new_gamma,
            "witness_index": self.witness_index,
            "rank_one": self.rank_one,
            "branch": self.branch,
        }


def _materialize(s: SequenceSpec, upto: int) -> list:
    if upto > MAX_MATERIALIZE:
        raise PreconditionError(
            f"perturbation needs index {upto}, beyond the materialization cap {MAX_MATERIALIZE}; use a larger eps"
        )
    return list(s.values(upto))


def perturb_to_attain(L: LazyOperator, eps: float, ctx: Optional[ToleranceContext] = None):
    """Return ``(S, L + S, certificate)`` with ``||S|| <= eps``, the same null
    space, and ``L + S`` attaining its reduced minimum modulus.

    * gamma attained: ``S = 0``.
    * gamma > 0 but not attained: ``S`` is rank one and moves the first
      weight with ``|w| <= gamma + eps/2`` onto the circle of radius gamma.
    * gamma = 0 (real nonnegative weights only): every nonzero weight below
      ``eps/2`` is lifted to ``eps/2``; zero weights stay zero.
    """
    ctx = resolve_context(ctx)
    if L.kind is not Kind.DIAGONAL:
        raise UnsupportedFamilyError("perturb_to_attain supports diagonal operators only")
    if not eps > 0:
        raise ValidationError("eps must be positive")
    rep = moduli(L, ctx)
    s = L.weights
    zero_op = LazyOperator.diagonal()
    if math.isinf(rep.gamma):
        raise PreconditionError("the zero operator has an empty carrier sphere; nothing can attain")
    if rep.attains_reduced_min:
        cert = PerturbationCertificate(0.0, rep.gamma, rep.gamma_witness, False, "attained")
        return zero_op, L, cert

    gamma = rep.gamma
    if gamma > 0:
        bound = gamma + eps / 2
        n0 = next((i for i, w in enumerate(s.prefix, start=1) if w != 0 and abs(w) <= bound), None)
        if n0 is None:
            t = s.tail  # an unattained positive infimum comes from a decreasing formula tail
            n0 = _first_index(lambda j: abs(t.at(j)) <= bound, s.start)
            if n0 is None:
                raise PreconditionError("could not locate a weight within eps/2 of gamma")
        new = _materialize(s, max(n0, len(s.prefix)))
        old = new[n0 - 1]
        new[n0 - 1] = gamma * old / abs(old)
        delta = [0j] * n0
        delta[n0 - 1] = new[n0 - 1] - old
        S = LazyOperator.diagonal(delta)
        Lp = LazyOperator(Kind.DIAGONAL, SequenceSpec(tuple(new), s.tail))
        branch = "rank_one"
    else:
        if not (s.is_real() and all(w.real >= 0 for w in s.prefix)):
            raise UnsupportedFamilyError("gamma = 0 branch needs real nonnegative weights")
        if isinstance(s.tail, FormulaTail) and s.tail.at(s.start) < 0:
            raise UnsupportedFamilyError("gamma = 0 branch needs real nonnegative weights")
        h = eps / 2
        lift = lambda w: w if (w == 0 or w.real >= h) else complex(h)  # noqa: E731
        new = [lift(w) for w in s.prefix]
        delta = [a - b for a, b in zip(new, s.prefix)]
        t = s.tail
        new_tail, s_tail = t, ZeroTail()
        if isinstance(t, ConstantTail) and 0 < t.value.real < h:
            new_tail, s_tail = ConstantTail(h), ConstantTail(h - t.value.real)
        elif isinstance(t, FormulaTail) and t.direction == "decreasing" and abs(t.limit) < h:
            k = _first_index(lambda j: t.at(j) < h, s.start)
            extra = _materialize(s, k - 1)[len(s.prefix):]
            new += extra
            delta += [0j] * len(extra)
            new_tail = ConstantTail(h)
            s_tail = t.mapped(("affine", h, -1.0), k)
        S = LazyOperator(Kind.DIAGONAL, SequenceSpec(tuple(delta), s_tail))
        Lp = LazyOperator(Kind.DIAGONAL, SequenceSpec(tuple(new), new_tail))
        branch = "lift"

    S.validate(ctx)
    new_rep = moduli(Lp, ctx)
    s_norm, _, _ = seq_modulus_sup(S.weights, ctx)
    cert = PerturbationCertificate(
        s_norm=s_norm,
        new_gamma=new_rep.gamma,
        witness_index=new_rep.gamma_witness,
        rank_one=branch == "rank_one",
        branch=branch,
    )
    return S, Lp, cert
