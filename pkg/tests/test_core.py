import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opgamma.core import (
    INF,
    InvariantError,
    ModulusReport,
    ToleranceContext,
    ValidationError,
    as_extended,
    default_context,
    reciprocal,
    resolve_context,
    validate_tolerance,
)


def test_valid_context_is_returned_unchanged():
    ctx = ToleranceContext(1e-12, 1e-9, 64, 32)
    assert validate_tolerance(ctx) is ctx


@pytest.mark.parametrize(
    "kwargs, msg",
    [
        (dict(rank_rel_tol=0.0), "rank_rel_tol must be positive"),
        (dict(rank_rel_tol=-1e-3), "rank_rel_tol must be positive"),
        (dict(check_tol=0.0), "check_tol must be positive"),
        (dict(truncation_dim=1), "truncation_dim ≥ 2"),
        (dict(tail_probe_depth=7), "tail_probe_depth ≥ 8"),
    ],
)
def test_invalid_context_rejected(kwargs, msg):
    base = dict(rank_rel_tol=1e-12, check_tol=1e-9, truncation_dim=64, tail_probe_depth=32)
    base.update(kwargs)
    with pytest.raises(ValidationError, match=msg):
        validate_tolerance(ToleranceContext(**base))


def test_auto_rank_tolerance_scales_with_shape():
    ctx = ToleranceContext()
    assert ctx.rank_tol_for((3, 7)) == 7 * np.finfo(float).eps
    assert ToleranceContext(rank_rel_tol=1e-6).rank_tol_for((3, 7)) == 1e-6


def test_with_validates():
    with pytest.raises(ValidationError):
        ToleranceContext().with_(check_tol=-1)
    assert ToleranceContext().with_(truncation_dim=200).truncation_dim == 200


def test_env_override(monkeypatch):
    monkeypatch.setenv("OPGAMMA_CHECK_TOL", "1e-6")
    assert default_context().check_tol == 1e-6
    assert resolve_context(None).check_tol == 1e-6
    monkeypatch.setenv("OPGAMMA_CHECK_TOL", "abc")
    with pytest.raises(ValidationError):
        default_context()
    monkeypatch.delenv("OPGAMMA_CHECK_TOL")
    assert default_context().check_tol == 1e-8


def test_reciprocal_conventions():
    assert reciprocal(0) == INF
    assert reciprocal(INF) == 0.0
    assert reciprocal(4.0) == 0.25
    with pytest.raises(ValidationError):
        as_extended(-1.0)
    with pytest.raises(ValidationError):
        as_extended(math.nan)


@given(st.one_of(st.just(0.0), st.just(INF), st.floats(min_value=1e-300, max_value=1e300)))
def test_reciprocal_involution(x):
    y = reciprocal(reciprocal(x))
    assert y == x or math.isclose(y, x, rel_tol=1e-15)


def _report(**kw):
    base = dict(m=0.0, gamma=0.5, attains_min=True, attains_reduced_min=True,
                closed_range=True, bounded=True, pinv_norm=2.0)
    base.update(kw)
    return ModulusReport(**base)


def test_report_invariants_accept_consistent_report():
    assert _report().violations() == []
    assert _report(gamma=INF, pinv_norm=0.0, attains_reduced_min=False).violations() == []


@pytest.mark.parametrize(
    "kw",
    [
        dict(m=1.0),
        dict(closed_range=False),
        dict(pinv_norm=3.0),
        dict(gamma=0.0, pinv_norm=INF, closed_range=False),  # attains but not closed
        dict(attains_min=False),
    ],
)
def test_report_invariants_reject(kw):
    with pytest.raises(InvariantError):
        _report(**kw).validate()


def test_report_to_dict_serializes_inf_and_witnesses():
    r = _report(gamma=INF, pinv_norm=0.0, attains_reduced_min=False, min_witness=3,
                gamma_witness=np.array([1j, 0]))
    d = r.to_dict()
    assert d["gamma"] == "inf" and d["pinv_norm"] == 0.0
    assert d["min_witness"] == {"basis_index": 3}
    assert d["gamma_witness"] == {"vector": [[0.0, 1.0], [0.0, 0.0]]}


def test_report_equality_ignores_witnesses():
    assert _report(min_witness=1) == _report(min_witness=np.ones(2))
