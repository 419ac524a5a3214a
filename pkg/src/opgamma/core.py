"""Shared types: tolerances, extended reals and modulus reports."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

INF = math.inf

Witness = Union[np.ndarray, int, None]


class OpGammaError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(OpGammaError, ValueError):
    """Malformed input: bad tolerances, inconsistent sequence tails, wrong shapes."""


class PreconditionError(OpGammaError, ValueError):
    """Well-formed input outside the domain of an operation."""


class InvariantError(OpGammaError, AssertionError):
    """A computed report violates one of its own invariants."""


@dataclass(frozen=True)
class ToleranceContext:
    """Numerical policy shared by every operation.

    ``rank_rel_tol=None`` selects ``max(rows, cols) * eps`` per matrix.
    """

    rank_rel_tol: Optional[float] = None
    check_tol: float = 1e-8
    truncation_dim: int = 64
    tail_probe_depth: int = 64

    def rank_tol_for(self, shape) -> float:
        if self.rank_rel_tol is not None:
            return self.rank_rel_tol
        return max(max(shape), 1) * np.finfo(float).eps

    def with_(self, **changes) -> "ToleranceContext":
        return validate_tolerance(replace(self, **changes))


def validate_tolerance(ctx: ToleranceContext) -> ToleranceContext:
    if ctx.rank_rel_tol is not None and not ctx.rank_rel_tol > 0:
        raise ValidationError("rank_rel_tol must be positive")
    if not ctx.check_tol > 0:
        raise ValidationError("check_tol must be positive")
    if int(ctx.truncation_dim) != ctx.truncation_dim or ctx.truncation_dim < 2:
        raise ValidationError("truncation_dim ≥ 2 required")
    if int(ctx.tail_probe_depth) != ctx.tail_probe_depth or ctx.tail_probe_depth < 8:
        raise ValidationError("tail_probe_depth ≥ 8 required")
    return ctx


def default_context() -> ToleranceContext:
    """Default tolerances, honouring ``OPGAMMA_CHECK_TOL`` if set."""
    env = os.environ.get("OPGAMMA_CHECK_TOL")
    if env:
        try:
            tol = float(env)
        except ValueError as exc:
            raise ValidationError(f"OPGAMMA_CHECK_TOL is not a number: {env!r}") from exc
        return validate_tolerance(ToleranceContext(check_tol=tol))
    return ToleranceContext()


def resolve_context(ctx: Optional[ToleranceContext]) -> ToleranceContext:
    return default_context() if ctx is None else validate_tolerance(ctx)


# Extended nonnegative reals are plain floats in [0, inf].

def as_extended(x) -> float:
    x = float(x)
    if math.isnan(x) or x < 0:
        raise ValidationError(f"not an extended nonnegative real: {x}")
    return x


def reciprocal(x) -> float:
    """1/x on [0, inf] with 1/0 = inf and 1/inf = 0."""
    x = as_extended(x)
    if x == 0:
        return INF
    if math.isinf(x):
        return 0.0
    return 1.0 / x


@dataclass(frozen=True)
class ModulusReport:
    m: float
    gamma: float
    attains_min: bool
    attains_reduced_min: bool
    closed_range: bool
    bounded: bool
    pinv_norm: float
    min_witness: Witness = field(default=None, compare=False)
    gamma_witness: Witness = field(default=None, compare=False)

    def violations(self, tol: float = 0.0) -> list[str]:
        out = []
        if self.m > self.gamma + tol:
            out.append(f"m={self.m} exceeds gamma={self.gamma}")
        if self.closed_range != (self.gamma > 0):
            out.append("closed_range disagrees with gamma > 0")
        expected = reciprocal(self.gamma)
        if math.isinf(expected) or math.isinf(self.pinv_norm):
            if expected != self.pinv_norm:
                out.append(f"pinv_norm={self.pinv_norm} but 1/gamma={expected}")
        elif abs(expected - self.pinv_norm) > tol * max(1.0, expected):
            out.append(f"pinv_norm={self.pinv_norm} but 1/gamma={expected}")
        if self.attains_reduced_min and not self.closed_range:
            out.append("attains reduced minimum without closed range")
        if self.attains_reduced_min and not self.attains_min:
            out.append("attains reduced minimum but not minimum")
        return out

    def validate(self, tol: float = 0.0) -> "ModulusReport":
        bad = self.violations(tol)
        if bad:
            raise InvariantError("; ".join(bad))
        return self

    def to_dict(self) -> dict:
        def wit(w):
            if w is None:
                return None
            if isinstance(w, (int, np.integer)):
                return {"basis_index": int(w)}
            return {"vector": [[float(z.real), float(z.imag)] for z in np.asarray(w).ravel()]}

        return {
            "m": _ext(self.m),
            "gamma": _ext(self.gamma),
            "attains_min": self.attains_min,
            "attains_reduced_min": self.attains_reduced_min,
            "closed_range": self.closed_range,
            "bounded": self.bounded,
            "pinv_norm": _ext(self.pinv_norm),
            "min_witness": wit(self.min_witness),
            "gamma_witness": wit(self.gamma_witness),
        }


def _ext(x: float):
    return "inf" if math.isinf(x) else float(x)
