"""Closed-form binary / quaternary classification from DH parameters.

All polynomials below are in the normalized parameters (a1 = 1).  The
separating surface is the lower explicit branch of ``q1 = 0`` solved for a3;
the upper branch is reported for plotting only and never decides a verdict.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .geometry import DhParams

TIE_TOL = 1e-9


class Verdict(str, enum.Enum):
    BINARY = "binary"
    QUATERNARY = "quaternary"


class Rule(str, enum.Enum):
    ZERO_LENGTH = "zero_length"
    NO_OFFSETS = "no_offsets"
    THRESHOLD_COMPARE = "threshold_compare"
    NUMERICAL_FALLBACK = "numerical_fallback"


class D3Caveat(str, enum.Enum):
    EXACT = "exact"
    SUFFICIENT_ONLY = "sufficient_only"
    CONDITIONALLY_EXACT = "conditionally_exact"


# (coefficient, a2 power, a3 power, d2 power)
Q1_TERMS = (
    (1, 6, 2, 0), (-2, 4, 2, 0), (-1, 4, 4, 0), (3, 4, 2, 2), (1, 2, 2, 0),
    (2, 2, 4, 0), (-2, 2, 4, 2), (3, 2, 2, 4), (-1, 0, 4, 0), (1, 0, 2, 2),
    (-2, 0, 4, 2), (2, 0, 2, 4), (-1, 0, 4, 4), (1, 0, 2, 6), (-1, 2, 0, 2),
)

Q2_TERMS = (
    (-543, 2, 5, 2), (648, 4, 5, 0), (-81, 2, 5, 0), (-32, 1, 4, 4), (-8, 1, 4, 2),
    (1110, 3, 4, 2), (-25, 5, 0, 2), (-47, 2, 3, 2), (-141, 2, 3, 4), (-47, 2, 3, 8),
    (-210, 6, 1, 2), (486, 10, 3, 0), (972, 6, 3, 0), (-1215, 8, 3, 0), (-1458, 5, 4, 0),
    (-8, 1, 4, 10), (-48, 1, 4, 6), (-32, 1, 4, 8), (-141, 2, 3, 6), (243, 3, 4, 0),
    (81, 5, 2, 0), (-162, 7, 2, 0), (81, 9, 2, 0), (-243, 4, 3, 0), (1224, 3, 4, 6),
    (300, 3, 4, 8), (1791, 3, 4, 4), (-801, 4, 3, 2), (35, 4, 1, 4), (29, 3, 2, 6),
    (444, 5, 2, 2), (58, 3, 2, 4), (35, 4, 1, 2), (16, 0, 5, 12), (80, 0, 5, 10),
    (160, 0, 5, 8), (160, 0, 5, 6), (80, 0, 5, 4), (16, 0, 5, 2), (-177, 5, 2, 4),
    (-813, 7, 2, 2), (-2340, 8, 5, 2), (2052, 4, 5, 4), (-2025, 6, 5, 0), (3078, 8, 5, 0),
    (1872, 8, 5, 4), (-3096, 7, 4, 4), (1440, 5, 4, 6), (-459, 6, 3, 4), (72, 9, 4, 2),
    (2268, 10, 5, 2), (648, 12, 5, 0), (972, 11, 4, 0), (-2268, 10, 5, 0), (3159, 7, 4, 0),
    (-1188, 5, 4, 4), (2601, 6, 3, 2), (-72, 6, 5, 6), (180, 4, 5, 6), (2340, 6, 5, 4),
    (2352, 4, 5, 2), (-1773, 8, 3, 2), (-2682, 5, 4, 2), (-1557, 6, 5, 2), (1872, 7, 4, 2),
    (-2916, 9, 4, 0), (29, 3, 2, 2), (-168, 4, 5, 8), (-552, 2, 5, 8), (-1227, 2, 5, 4),
    (-1233, 2, 5, 6), (-84, 2, 5, 10), (-1845, 4, 3, 4), (-1287, 4, 3, 6),
)


def _poly(terms, a2, a3, d2):
    return sum(c * a2**i * a3**j * d2**k for c, i, j, k in terms)


def q1(a2, a3, d2):
    """Separating-surface polynomial; quadratic in a3**2."""
    return _poly(Q1_TERMS, a2, a3, d2)


def q2(a2, a3, d2):
    """Second elimination factor.  Diagnostic only, never used for verdicts."""
    return _poly(Q2_TERMS, a2, a3, d2)


def q3(a2, a3, d2):
    return -a2 + a3 * d2**2 + a3


def q2_diagnostics() -> dict:
    """Structural facts about the ``q2`` term table.

    Flags anything that would hint at a copying slip: repeated
    monomials, and the spread of total degrees (the a1 = 1 form is not
    homogeneous, so the ratio q2(2x)/q2(x) is not a fixed power of two).
    """
    exps = [t[1:] for t in Q2_TERMS]
    degrees = sorted({sum(e) for e in exps})
    x = (1.0, 1.0, 1.0)
    ratio = q2(*(2 * v for v in x)) / q2(*x)
    return {
        "monomials": len(Q2_TERMS),
        "duplicate_monomials": len(exps) - len(set(exps)),
        "even_in_d2": all(e[2] % 2 == 0 for e in exps),
        "total_degrees": degrees,
        "scaling_ratio_k2": ratio,
        "homogeneous": len(degrees) == 1,
    }


class ReferenceSurfaces(NamedTuple):
    ref8: float
    ref9: float
    ref10: float
    ref11: float


def reference_surfaces(a2, a3, d2) -> ReferenceSurfaces:
    """Left-hand sides of the four cusp-count domain walls."""
    ref8 = a2**2 - a3**2 + d2**2
    ref9 = (
        a3**2 * a2**6 - a3**4 * a2**4 + 3 * a3**2 * a2**4 * d2**2 - 2 * a3**2 * a2**4
        + 2 * a3**4 * a2**2 - 2 * a3**4 * a2**2 * d2**2 + a3**2 * a2**2
        + 3 * a3**2 * a2**2 * d2**4 - a2**2 * d2**2 - 2 * a3**4 * d2**2 - a3**4
        + a3**2 * d2**6 + a3**2 * d2**2 + 2 * a3**2 * d2**4
    )
    ref10 = a2**2 * d2**2 + a2**2 - 2 * a2**3 + a2**4 - a3**2 + 2 * a2 * a3**2 - a2**2 * a3**2
    ref11 = a2**2 * d2**2 + a2**2 + 2 * a2**3 + a2**4 - a3**2 + 2 * a2 * a3**2 - a2**2 * a3**2
    return ReferenceSurfaces(ref8, ref9, ref10, ref11)


@dataclass(frozen=True)
class ThresholdComputation:
    """Both explicit a3-branches of ``q1 = 0`` at given (a1, a2, d2).

    A branch is ``None`` when its radicand is negative; the radicand itself is
    kept so that the occurrence is visible to callers.
    """

    A: float
    B: float
    radicand_low: float
    radicand_high: float

    @property
    def threshold_low(self) -> Optional[float]:
        return 0.5 * math.sqrt(self.radicand_low) if self.radicand_low >= 0.0 else None

    @property
    def threshold_high(self) -> Optional[float]:
        return 0.5 * math.sqrt(self.radicand_high) if self.radicand_high >= 0.0 else None


def a3_threshold(a1: float, a2: float, d2: float) -> ThresholdComputation:
    """Explicit a3 values on the separating surface for a general a1."""
    for name, v in (("a1", a1), ("a2", a2), ("d2", d2)):
        if not (math.isfinite(v) and v > 0.0):
            raise ValueError(f"{name} must be finite and positive, got {v!r}")
    A = math.sqrt((a2 + a1) ** 2 + d2**2)
    B = math.sqrt((a2 - a1) ** 2 + d2**2)
    m = a2**2 + d2**2
    frac = 2.0 * (m**2 - a1**2 * (a2**2 - d2**2)) / (A * B)
    return ThresholdComputation(A, B, 2.0 * m - frac, 2.0 * m + frac)


def _threshold_no_d2(a1: float, a2: float) -> float:
    """Limit of the lower branch as d2 -> 0 (used only when d3 > 0)."""
    if a2 > a1:
        return 0.0
    if a2 < a1:
        return a2
    return a1 / math.sqrt(2.0)


@dataclass(frozen=True)
class ClassificationResult:
    verdict: Verdict
    rule: Rule
    threshold: Optional[float] = None
    d3_caveat: D3Caveat = D3Caveat.EXACT
    on_surface: bool = False

    @property
    def quaternary(self) -> bool:
        return self.verdict is Verdict.QUATERNARY

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rule": self.rule.value,
            "threshold": self.threshold,
            "d3_caveat": self.d3_caveat.value,
            "on_surface": self.on_surface,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ClassificationResult:
        return cls(
            Verdict(d["verdict"]),
            Rule(d["rule"]),
            d["threshold"],
            D3Caveat(d["d3_caveat"]),
            d["on_surface"],
        )


def d3_caveat(params: DhParams, verdict: Verdict) -> D3Caveat:
    """How far the verdict can be trusted once the last offset is nonzero.

    The threshold test stays sufficient for any d3, so a quaternary verdict is
    always firm.  A binary one is firm only under the two known provisos.
    """
    if params.d3 == 0.0 or verdict is Verdict.QUATERNARY:
        return D3Caveat.EXACT
    if params.d2 >= params.a1 / (2.0 * math.sqrt(2.0)) or params.d3 <= 2.0 * params.d2:
        return D3Caveat.CONDITIONALLY_EXACT
    return D3Caveat.SUFFICIENT_ONLY


def classify(params: DhParams, tie_tol: float = TIE_TOL) -> ClassificationResult:
    """Decide whether the manipulator is binary or quaternary.

    Rules are tried in order: a zero link length, no joint offsets at all,
    then the threshold comparison on a3.  A manipulator lying on the
    separating surface (within ``tie_tol * a2``) is reported quaternary with
    ``on_surface`` set, since it owns a point with four coincident solutions.
    """
    a1, a2, a3, d2, d3 = params.as_tuple()
    if a1 == a2 == a3 == d2 == d3 == 0.0:
        raise ValueError("all parameters are zero")

    if a1 == 0.0 or a2 == 0.0 or a3 == 0.0:
        return ClassificationResult(Verdict.QUATERNARY, Rule.ZERO_LENGTH)

    if d2 == 0.0 and d3 == 0.0:
        quaternary = a1 != a2 and not (a1 > a2 > a3)
        verdict = Verdict.QUATERNARY if quaternary else Verdict.BINARY
        return ClassificationResult(verdict, Rule.NO_OFFSETS)

    if d2 == 0.0:
        threshold = _threshold_no_d2(a1, a2)
    else:
        threshold = a3_threshold(a1, a2, d2).threshold_low

    if threshold is None:
        from .workspace import numerical_classify

        verdict = numerical_classify(params)
        return ClassificationResult(verdict, Rule.NUMERICAL_FALLBACK, None, d3_caveat(params, verdict))

    on_surface = abs(a3 - threshold) <= tie_tol * a2
    verdict = Verdict.QUATERNARY if (a3 > threshold or on_surface) else Verdict.BINARY
    return ClassificationResult(verdict, Rule.THRESHOLD_COMPARE, threshold, d3_caveat(params, verdict), on_surface)
