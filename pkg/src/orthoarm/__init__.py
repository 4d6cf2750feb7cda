"""Binary / quaternary classification of orthogonal 3R manipulators."""

from ._core import BACKEND
from .classify import ClassificationResult, D3Caveat, Rule, Verdict, a3_threshold, classify
from .geometry import (
    CartesianPoint,
    CrossSectionPoint,
    DhParams,
    JointConfig,
    cross_section,
    forward_kinematics,
    jacobian_det,
    normalize,
)
from .ik import (
    MultiplicityInvariants,
    QuarticCoeffs,
    RootCluster,
    count_iks,
    inverse_kinematics,
    multiplicity_invariants,
    point_invariants,
    quartic_coeffs,
    solve_quartic_real,
)

__all__ = [
    "BACKEND",
    "CartesianPoint",
    "ClassificationResult",
    "CrossSectionPoint",
    "D3Caveat",
    "DhParams",
    "JointConfig",
    "MultiplicityInvariants",
    "QuarticCoeffs",
    "RootCluster",
    "Rule",
    "Verdict",
    "a3_threshold",
    "classify",
    "count_iks",
    "cross_section",
    "forward_kinematics",
    "inverse_kinematics",
    "jacobian_det",
    "multiplicity_invariants",
    "normalize",
    "point_invariants",
    "quartic_coeffs",
    "solve_quartic_real",
]
