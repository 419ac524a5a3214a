"""Minimum modulus, reduced minimum modulus and related operator metrics.

Two backends share one report type: dense complex matrices
(:mod:`opgamma.matrix_ops`) and lazy diagonal / weighted-shift operators on
l2 described by analyzable weight sequences (:mod:`opgamma.lazy_ops`).
"""

from .core import (
    INF,
    InvariantError,
    ModulusReport,
    OpGammaError,
    PreconditionError,
    ToleranceContext,
    ValidationError,
    default_context,
)
from .lazy_ops import (
    ConstantTail,
    FormulaTail,
    InconsistentTailError,
    Kind,
    LazyOperator,
    SequenceSpec,
    UnsupportedFamilyError,
    ZeroTail,
    gap_lazy_diag,
    perturb_to_attain,
    pinv_lazy,
    theta_nI_lazy,
)
from .matrix_ops import bounded_transform, moduli, pinv, polar
from .metrics import GapReport, carrier_gap, gap_by_definition, gap_by_formula, theta_nI_matrix
from .theorems import run_all, run_check

__version__ = "0.1.0"

__all__ = [
    "INF",
    "InvariantError",
    "ModulusReport",
    "OpGammaError",
    "PreconditionError",
    "ToleranceContext",
    "ValidationError",
    "default_context",
    "ConstantTail",
    "FormulaTail",
    "InconsistentTailError",
    "Kind",
    "LazyOperator",
    "SequenceSpec",
    "UnsupportedFamilyError",
    "ZeroTail",
    "gap_lazy_diag",
    "perturb_to_attain",
    "pinv_lazy",
    "theta_nI_lazy",
    "bounded_transform",
    "moduli",
    "pinv",
    "polar",
    "GapReport",
    "carrier_gap",
    "gap_by_definition",
    "gap_by_formula",
    "theta_nI_matrix",
    "run_all",
    "run_check",
]
