"""Smoothability checks for simple normal crossing complex surfaces.

The exact side decides d-semistability, anticanonical double loci and
residue matching from declared divisor-class data, runs blow-up plans and
classifies the smoothed fiber. The numeric side checks the local chart
identities of the gluing construction at sampled points.
"""

from .blowup import (
    BlowupPlan,
    BlowupStep,
    BothSides,
    Infeasible,
    OneSide,
    blow_up,
    detect_mismatch,
    plan_blowups_to_trivialize,
    run_plan,
)
from .canonical import (
    build_rho_matrix,
    check_anticanonical,
    check_residue_matching,
    collective_normal_class,
    h0_canonical_dimension,
    is_d_semistable,
)
from .core import Component, CurveSide, DoubleCurve, SncSurface, TriplePoint, validate_structure
from .report import Classification, SmoothingReport, classify_fiber, euler_fiber, full_report

__version__ = "0.1.0"

__all__ = [
    "BlowupPlan",
    "BlowupStep",
    "BothSides",
    "Classification",
    "Component",
    "CurveSide",
    "DoubleCurve",
    "Infeasible",
    "OneSide",
    "SmoothingReport",
    "SncSurface",
    "TriplePoint",
    "blow_up",
    "build_rho_matrix",
    "check_anticanonical",
    "check_residue_matching",
    "classify_fiber",
    "collective_normal_class",
    "detect_mismatch",
    "euler_fiber",
    "full_report",
    "h0_canonical_dimension",
    "is_d_semistable",
    "plan_blowups_to_trivialize",
    "run_plan",
    "validate_structure",
]
