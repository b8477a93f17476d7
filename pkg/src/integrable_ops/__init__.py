"""Exact tools for operations that preserve p-integrability.

Terms over lattice, truncation and truncated-supremum primitives are parsed,
evaluated exactly over the rationals, certified with linear bounds, refuted
with discrete measure-space witnesses, synthesized from indicator specs and
checked against concrete algebra models.
"""

from .exact import Interval, PiecewiseAffine, Rational, pwa_sup_capped, rational, sup_affine_capped
from .terms import (
    AbsPow, Add, Affine, FamilyList, Join, Monotone, One, Proj, Scale, Signature, Square, Term,
    Trunc, TruncSup, Zero, x,
)
from .dsl import ParseError, format_term, parse
from .evaluation import StabilityWarning, eval_on_grid, evaluate, free_eq
from .certify import BoundCertificate, NotCertifiable, classify, infer_bound, interval_bound
from .witness import WitnessConfig, build_witness, find_violation, verify_witness
from .synthesis import indicator_ge, indicator_gt, ladder_term, region_indicator, simple_term
from .models import FinitePowerAlgebra, RealModel, SigmaIdealQuotient, check_identity

__version__ = "0.1.0"

__all__ = [
    "Interval", "PiecewiseAffine", "Rational", "pwa_sup_capped", "rational", "sup_affine_capped",
    "AbsPow", "Add", "Affine", "FamilyList", "Join", "Monotone", "One", "Proj", "Scale",
    "Signature", "Square", "Term", "Trunc", "TruncSup", "Zero", "x",
    "ParseError", "format_term", "parse",
    "StabilityWarning", "eval_on_grid", "evaluate", "free_eq",
    "BoundCertificate", "NotCertifiable", "classify", "infer_bound", "interval_bound",
    "WitnessConfig", "build_witness", "find_violation", "verify_witness",
    "indicator_ge", "indicator_gt", "ladder_term", "region_indicator", "simple_term",
    "FinitePowerAlgebra", "RealModel", "SigmaIdealQuotient", "check_identity",
]
