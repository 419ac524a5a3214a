import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opgamma import lazy_ops as lz
from opgamma import matrix_ops as mo
from opgamma.core import INF, PreconditionError, ValidationError
from opgamma.lazy_ops import (
    ConstantTail,
    FormulaTail,
    InconsistentTailError,
    Kind,
    LazyOperator,
    SequenceSpec,
    UnsupportedFamilyError,
    ZeroTail,
)
from opgamma.metrics import gap_by_definition

D, F, B = LazyOperator.diagonal, LazyOperator.forward_shift, LazyOperator.backward_shift
INV_N = FormulaTail([1], [0, 1], 0.0, "decreasing")
ONE_PLUS = FormulaTail([1, 1], [0, 1], 1.0, "decreasing")
INDEX = FormulaTail([0, 1], [1], INF, "increasing")
INDEX_PLUS_INV = FormulaTail([1, 0, 1], [0, 1], INF, "increasing")  # n + 1/n


# --- sequences ------------------------------------------------------------------


def test_seq_modulus_inf_examples():
    assert lz.seq_modulus_inf(SequenceSpec((), INV_N), False) == (0.0, False, None)
    assert lz.seq_modulus_inf(SequenceSpec([5], ConstantTail(2)), False) == (2.0, True, 2)
    assert lz.seq_modulus_inf(SequenceSpec((), ONE_PLUS), True) == (1.0, False, None)


def test_seq_modulus_inf_one_million_terms_never_reach_limit():
    vals = ONE_PLUS(np.arange(1, 10**6 + 1, dtype=float))
    assert np.all(vals > 1.0)


def test_seq_modulus_inf_empty_support():
    assert lz.seq_modulus_inf(SequenceSpec([0, 0]), True) == (INF, False, None)
    assert lz.seq_modulus_inf(SequenceSpec([0, 0]), False) == (0.0, True, 1)


def test_seq_modulus_sup():
    assert lz.seq_modulus_sup(SequenceSpec((), INDEX)) == (INF, False, None)
    assert lz.seq_modulus_sup(SequenceSpec([0.5], ONE_PLUS)) == (1.5, True, 2)


@pytest.mark.parametrize(
    "tail",
    [
        FormulaTail([1], [0, 1], 0.0, "increasing"),  # wrong direction
        FormulaTail([1], [0, 1], 0.5, "decreasing"),  # wrong limit
        FormulaTail([1, -1], [0, 1], 1.0, "increasing"),  # 1 - 1/n hits 0 at n = 1
        FormulaTail([-200, 1], [1], INF, "increasing"),  # sign change at n = 200
        FormulaTail([100, -30, 1], [0, 0, 1], 1.0, "decreasing"),  # turning point late
        FormulaTail([1], [0, 1], -0.0 - 1.0, "decreasing"),  # limit of wrong sign
    ],
)
def test_inconsistent_tails_rejected(tail):
    with pytest.raises(InconsistentTailError):
        SequenceSpec((), tail).validate()


def test_formula_tail_rejects_bad_construction():
    with pytest.raises(ValidationError):
        FormulaTail([1], [0], 0.0, "decreasing")
    with pytest.raises(ValidationError):
        FormulaTail([1], [1], 0.0, "sideways")


def test_sequence_indexing():
    s = SequenceSpec([3, 4j], INV_N)
    assert s[1] == 3 and s[2] == 4j and s[3] == pytest.approx(1 / 3)
    assert np.allclose(s.values(4), [3, 4j, 1 / 3, 1 / 4])
    with pytest.raises(IndexError):
        s[0]
    with pytest.raises(ValidationError):
        SequenceSpec([math.inf])


# --- operators ------------------------------------------------------------------


def test_moduli_examples():
    r = lz.moduli(F((), INV_N))
    assert (r.m, r.attains_min, r.gamma, r.closed_range) == (0.0, False, 0.0, False)
    r = lz.moduli(B((), INV_N))
    assert (r.m, r.attains_min, r.min_witness) == (0.0, True, 1)
    r = lz.moduli(D([0, 0.5, 1], ConstantTail(1)))
    assert (r.m, r.attains_min, r.gamma, r.attains_reduced_min) == (0.0, True, 0.5, True)
    r = lz.moduli(D((), INDEX))
    assert not r.bounded and r.gamma == 1.0 and r.attains_reduced_min


def test_backward_shift_gamma_witness_is_shifted():
    r = lz.moduli(B([0, 3], ConstantTail(2)))
    # acting coordinates: e_2 -> 0 (w_1 = 0), e_3 -> 3 e_2, e_4 -> 2 e_3, ...
    assert r.gamma == 2.0 and r.gamma_witness == 4


def test_adjoint_examples():
    assert lz.adjoint(D((), ConstantTail(1j))) == D((), ConstantTail(-1j))
    assert lz.adjoint(F((), INV_N)) == B((), INV_N)
    assert lz.adjoint(B((), INV_N)) == F((), INV_N)


def test_pinv_examples():
    assert lz.pinv_lazy(D([2, 0], ConstantTail(3))) == D([0.5, 0], ConstantTail(1 / 3))
    P = lz.pinv_lazy(F((), ConstantTail(2)))
    assert P == B((), ConstantTail(0.5))
    T, Pm = lz.truncate(F((), ConstantTail(2)), 6), lz.truncate(P, 6)
    proj = Pm @ T
    assert np.allclose(proj, np.diag([1, 1, 1, 1, 1, 0]))  # the last column is cut off by truncation
    with pytest.raises(PreconditionError):
        lz.pinv_lazy(D((), INV_N))


def test_pinv_of_complex_shift_uses_conjugate():
    T = F([1j, 2], ConstantTail(1 + 1j))
    P = lz.pinv_lazy(T)
    Tm, Pm = lz.truncate(T, 8), lz.truncate(P, 8)
    assert np.allclose(Pm, np.linalg.pinv(Tm)[:8, :8] * (np.abs(Pm) > 0))


def test_pinv_norm_matches_gamma():
    L = D([4, 0], ONE_PLUS)
    norm, attained, _ = lz.operator_norm_lazy(lz.pinv_lazy(L))
    assert norm == pytest.approx(1 / lz.moduli(L).gamma) and not attained


def test_bounded_transform_examples():
    Fm = lz.bounded_transform_lazy(D((), INDEX))
    assert Fm.weights.tail.limit == 1.0 and Fm.weights.tail.direction == "increasing"
    assert Fm.weights[3] == pytest.approx(3 / math.sqrt(10))
    assert lz.bounded_transform_lazy(D((), ConstantTail(1))) == D((), ConstantTail(1 / math.sqrt(2)))
    g = lz.moduli(lz.bounded_transform_lazy(D((), ONE_PLUS))).gamma
    assert g == pytest.approx(1 / math.sqrt(2))
    norm, _, _ = lz.operator_norm_lazy(Fm)
    assert norm == 1.0


def test_truncate_examples():
    assert np.allclose(lz.truncate(D((), INV_N), 3), np.diag([1, 1 / 2, 1 / 3]))
    assert np.allclose(lz.truncate(F((), ConstantTail(1)), 3), np.eye(3, k=-1))
    assert np.allclose(lz.truncate(B((), INV_N), 2), [[0, 1], [0, 0]])
    with pytest.raises(ValidationError):
        lz.truncate(D(), lz.MAX_TRUNCATION + 1)


def test_truncation_gamma_converges():
    L = D([0, 3], ONE_PLUS)
    g = lz.moduli(L).gamma
    prev = INF
    for N in (16, 64, 256):
        gN = mo.moduli(lz.truncate(L, N)).gamma
        assert g < gN < prev
        prev = gN
    assert prev - g < 1 / 250


def test_null_set():
    assert lz.null_set(D([0, 1, 0])) == lz.NullSet(frozenset({1}), 3)
    assert lz.null_set(D([1], INV_N)) == lz.NullSet(frozenset(), None)
    assert lz.null_set(B([1], INV_N)) == lz.NullSet(frozenset({1}), None)
    assert lz.null_set(B()) == lz.NullSet(frozenset(), 1)


def test_theta_ni_examples():
    T = D((), INDEX)
    assert lz.theta_nI_lazy(T, 1) == pytest.approx(0.70710678, abs=1e-8)
    assert lz.theta_nI_lazy(T, 3) == pytest.approx(0.44721360, abs=1e-8)
    assert lz.theta_nI_lazy(D([-0.5], INDEX), 2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        lz.theta_nI_lazy(F((), INDEX), 1)
    with pytest.raises(ValidationError):
        lz.theta_nI_lazy(D([1j]), 1)


def test_theta_ni_finds_interior_peak_of_tail():
    # f(x) = |x - 3| / sqrt(1 + x^2) peaks at x = -1/3, which the tail -1/n hits at n = 3
    tail = FormulaTail([-1], [0, 1], 0.0, "decreasing")
    assert lz.theta_nI_lazy(D((), tail), 3) == pytest.approx(1.0, abs=1e-12)


def test_gap_lazy_diag_examples():
    assert lz.gap_lazy_diag(D((), ConstantTail(1)), D()) == pytest.approx(1 / math.sqrt(2))
    L = D([1, 2], ONE_PLUS)
    assert lz.gap_lazy_diag(L, L) == 0.0
    with pytest.raises(ValidationError):
        lz.gap_lazy_diag(F(), D())


def test_gap_lazy_diag_against_truncated_projection_oracle():
    a, b = D((), INDEX), D((), INDEX_PLUS_INV)
    value = lz.gap_lazy_diag(a, b)
    assert value == pytest.approx(1 / math.sqrt(10), abs=1e-12)
    oracle = gap_by_definition(lz.truncate(a, 200), lz.truncate(b, 200))
    assert abs(value - oracle) < 1e-3


# --- perturbation ---------------------------------------------------------------


def test_perturb_rank_one_branch():
    S, Lp, cert = lz.perturb_to_attain(D((), ONE_PLUS), 0.1)
    assert cert.branch == "rank_one" and cert.rank_one
    assert cert.witness_index == 20 and cert.new_gamma == 1.0
    assert cert.s_norm == pytest.approx(0.05) and cert.s_norm <= 0.1
    assert Lp.weights[20] == 1.0 and Lp.weights[19] == pytest.approx(20 / 19)
    assert np.count_nonzero(S.weights.values(100)) == 1


def test_perturb_already_attained():
    L = D([2], ConstantTail(3))
    S, Lp, cert = lz.perturb_to_attain(L, 0.5)
    assert cert.branch == "attained" and cert.s_norm == 0 and Lp == L and S == D()


def test_perturb_lift_branch():
    L = D((), INV_N)
    S, Lp, cert = lz.perturb_to_attain(L, 0.2)
    assert cert.branch == "lift" and cert.new_gamma == pytest.approx(0.1)
    assert cert.s_norm <= 0.1 + 1e-15
    assert np.allclose(Lp.weights.values(10), 1 / np.arange(1, 11))
    assert Lp.weights.tail == ConstantTail(0.1)
    vals = L.weights.values(5000) + S.weights.values(5000)
    assert np.allclose(vals, Lp.weights.values(5000))
    assert lz.null_set(Lp) == lz.null_set(L)


def test_perturb_lift_keeps_zero_weights():
    L = D([0, 0.3, 0], INV_N)
    S, Lp, cert = lz.perturb_to_attain(L, 0.1)
    assert lz.null_set(Lp) == lz.null_set(L) == lz.NullSet(frozenset({1, 3}), None)
    assert lz.moduli(Lp).attains_reduced_min


def test_perturb_rejects_unsupported():
    with pytest.raises(UnsupportedFamilyError):
        lz.perturb_to_attain(F((), ONE_PLUS), 0.1)
    with pytest.raises(UnsupportedFamilyError):
        lz.perturb_to_attain(D([1j], INV_N), 0.1)
    with pytest.raises(ValidationError):
        lz.perturb_to_attain(D((), ONE_PLUS), 0.0)
    with pytest.raises(PreconditionError):
        lz.perturb_to_attain(D(), 0.1)
    with pytest.raises(PreconditionError):
        lz.perturb_to_attain(D((), FormulaTail([1], [0, 0, 0, 1], 0.0, "decreasing")), 1e-30)


# --- properties -----------------------------------------------------------------

weights = st.lists(
    st.one_of(st.just(0.0), st.integers(-50, 50).map(lambda k: k / 10)), min_size=0, max_size=6
)


@st.composite
def tails(draw):
    kind = draw(st.sampled_from(["zero", "const", "inv", "one_plus", "index"]))
    scale = draw(st.sampled_from([1.0, 2.0, 0.5, -1.0]))
    if kind == "zero":
        return ZeroTail()
    if kind == "const":
        return ConstantTail(scale)
    if kind == "inv":
        return FormulaTail([scale], [0, 1], 0.0, "decreasing")
    if kind == "one_plus":
        return FormulaTail([scale, scale], [0, 1], scale, "decreasing")
    return FormulaTail([0, scale], [1], math.copysign(INF, scale), "increasing")


@st.composite
def lazy_ops(draw, kinds=tuple(Kind)):
    return LazyOperator(draw(st.sampled_from(kinds)), SequenceSpec(tuple(draw(weights)), draw(tails())))


@settings(max_examples=200, deadline=None)
@given(lazy_ops())
def test_adjoint_invariants(L):
    r, ra = lz.moduli(L), lz.moduli(lz.adjoint(L))
    assert r.gamma == ra.gamma
    assert r.attains_reduced_min == ra.attains_reduced_min
    assert lz.adjoint(lz.adjoint(L)) == L


@settings(max_examples=200, deadline=None)
@given(lazy_ops())
def test_bounded_transform_preserves_attainment(L):
    r, rf = lz.moduli(L), lz.moduli(lz.bounded_transform_lazy(L))
    assert r.attains_reduced_min == rf.attains_reduced_min
    if math.isfinite(r.gamma):
        assert rf.gamma == pytest.approx(r.gamma / math.sqrt(1 + r.gamma**2), abs=1e-15)
    norm, _, _ = lz.operator_norm_lazy(lz.bounded_transform_lazy(L))
    assert (norm < 1) == r.bounded


@settings(max_examples=200, deadline=None)
@given(lazy_ops())
def test_duality_with_pinv(L):
    r = lz.moduli(L)
    if r.gamma == 0 or math.isinf(r.gamma):
        return
    norm, attained, _ = lz.operator_norm_lazy(lz.pinv_lazy(L))
    assert attained == r.attains_reduced_min
    assert norm * r.gamma == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(lazy_ops(kinds=(Kind.DIAGONAL,)))
def test_real_diagonal_attains_iff_gamma_is_an_entry(L):
    r = lz.moduli(L)
    entries = L.weights.values(len(L.weights.prefix) + 64)
    is_entry = any(abs(abs(w) - r.gamma) == 0 for w in entries if w != 0)
    assert r.attains_reduced_min == is_entry


@settings(max_examples=200, deadline=None)
@given(lazy_ops(), st.integers(2, 40))
def test_truncation_moduli_bounded_by_lazy_moduli(L, N):
    r = lz.moduli(L)
    M = lz.truncate(L, N)
    # every truncated operator's carrier norms come from weights the lazy analysis also sees
    if r.bounded:
        norm, _, _ = lz.operator_norm_lazy(L)
        assert mo.operator_norm(M) <= norm + 1e-12


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.integers(0, 40).map(lambda k: k / 10), max_size=5),
    st.sampled_from([0.5, 0.1, 0.01]),
    st.sampled_from(["inv", "one_plus", "const"]),
)
def test_perturbation_postconditions(prefix, eps, kind):
    tail = {"inv": INV_N, "one_plus": ONE_PLUS, "const": ConstantTail(0.7)}[kind]
    L = D(prefix, tail)
    S, Lp, cert = lz.perturb_to_attain(L, eps)
    assert lz.seq_modulus_sup(S.weights)[0] <= eps
    assert lz.null_set(Lp) == lz.null_set(L)
    assert lz.moduli(Lp).attains_reduced_min
    n = len(Lp.weights.prefix) + 100
    assert np.allclose(L.weights.values(n) + S.weights.values(n), Lp.weights.values(n), atol=1e-15)
