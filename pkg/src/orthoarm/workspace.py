"""Singularity curves, workspace boundaries and numerical classification oracles.

Everything here works on the normalized chain internally and reports
cross-section coordinates in the caller's units.  The boundary machinery
assumes d3 = 0: the reduced Jacobian determinant then factors and its second
factor is solved in closed form for theta3 as a function of theta2,

    theta3 = atan2(d2 cos theta2, a1 + a2 cos theta2) + k pi,

which gives two smooth closed curves with no poles: k = 1 is the internal
boundary S1 and k = 0 the external one S2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _core
from .classify import Verdict
from .geometry import CrossSectionPoint, DhParams, jacobian_det_array, normalize
from .ik import MultiplicityInvariants, coeffs_from_invariants, invariants_array, rotate_coeffs

DEFAULT_SAMPLES = 2048
CURVE_TOL = 1e-9
FEAT_TOL = 1e-7
DEFAULT_GRID_RES = 1024


class FeatureKind(str, enum.Enum):
    CUSP = "cusp"
    NODE = "node"
    QUADRUPLE = "quadruple_point"


@dataclass
class JointCurve:
    """Samples (theta2, theta3) of one singularity branch.

    ``branch_id`` is ``S1``/``S2`` for the closed curves and ``H+``/``H-`` for
    the lines theta3 = +-arccos(-a2/a3) that exist when a2 <= a3.
    """

    branch_id: str
    theta2: np.ndarray
    theta3: np.ndarray


@dataclass
class BoundaryCurve:
    branch_id: str
    rho: np.ndarray
    z: np.ndarray
    theta2: np.ndarray
    theta3: np.ndarray
    closed: bool = True

    def points(self) -> list[CrossSectionPoint]:
        return [CrossSectionPoint(float(r), float(z)) for r, z in zip(self.rho, self.z)]


@dataclass
class BoundaryFeature:
    kind: FeatureKind
    location: CrossSectionPoint
    residuals: MultiplicityInvariants
    branch_id: str = "WS1"
    theta2: tuple[float, ...] = field(default_factory=tuple)


@dataclass
class QuadruplePoint:
    location: CrossSectionPoint
    residuals: MultiplicityInvariants
    scale: float
    theta2: float
    theta3: float

    def below(self, tol: float) -> bool:
        """True when every residual is under ``tol`` times the coefficient scale."""
        return all(abs(e) < tol * self.scale for e in self.residuals)


def _require_boundary_params(params: DhParams) -> DhParams:
    if min(params.a1, params.a2, params.a3, params.d2) <= 0.0:
        raise ValueError("boundary analysis needs strictly positive a1, a2, a3, d2")
    if params.d3 != 0.0:
        raise ValueError("boundary analysis supports d3 = 0 only")
    return normalize(params)


def _branch_theta3(pn: DhParams, theta2: np.ndarray, k: int) -> np.ndarray:
    c2 = np.cos(theta2)
    t3 = np.arctan2(pn.d2 * c2, 1.0 + pn.a2 * c2) + k * np.pi
    return np.mod(t3 + np.pi, 2 * np.pi) - np.pi


def _planar(pn: DhParams, theta2, theta3):
    c2, s2 = np.cos(theta2), np.sin(theta2)
    c3, s3 = np.cos(theta3), np.sin(theta3)
    w = pn.a2 + pn.a3 * c3
    x0 = 1.0 + w * c2
    y0 = pn.d2 + pn.a3 * s3
    return np.hypot(x0, y0), -w * s2


def _invariants_at(pn: DhParams, rho, z, phi):
    """Scale-normalized (e1, e2, e3) and the coefficient scale at points.

    The quartic is re-expressed in u = tan((theta3 - phi)/2) with phi the
    branch angle of each boundary sample, which keeps the double-root
    cluster near u = 0.  Without this, clusters near theta3 = pi push every
    coefficient but the last towards zero and e3 vanishes spuriously.
    """
    R = rho * rho
    V = -R - z * z - 1.0 + pn.a2**2 + pn.d2**2 + pn.a3**2
    c = np.array(rotate_coeffs(*coeffs_from_invariants(pn.a2, pn.a3, pn.d2, V, R), phi))
    scale = np.maximum(1.0, np.max(np.abs(c), axis=0))
    e1, e2, e3 = invariants_array(*c)
    return e1 / scale**2, e2 / scale**3, e3 / scale**2, scale, c


def _theta2_grid(n: int) -> np.ndarray:
    return -np.pi + 2 * np.pi * np.arange(n) / n


def singularity_curves(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> list[JointCurve]:
    pn = _require_boundary_params(params)
    theta2 = _theta2_grid(n_samples)
    curves = [
        JointCurve("S1", theta2, _branch_theta3(pn, theta2, 1)),
        JointCurve("S2", theta2, _branch_theta3(pn, theta2, 0)),
    ]
    if pn.a2 <= pn.a3:
        t3 = math.acos(-pn.a2 / pn.a3)
        curves.append(JointCurve("H+", theta2, np.full(n_samples, t3)))
        curves.append(JointCurve("H-", theta2, np.full(n_samples, -t3)))
    return curves


def boundary_cross_section(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> list[BoundaryCurve]:
    """Images of the singularity curves in the (rho, z) half-plane.

    S1 maps to the internal boundary WS1, S2 to the external boundary WS2.
    Each horizontal line collapses to a single point and is returned as a
    one-sample, open curve.
    """
    pn = _require_boundary_params(params)
    k = params.a1
    out = []
    for curve in singularity_curves(params, n_samples):
        rho, z = _planar(pn, curve.theta2, curve.theta3)
        if curve.branch_id.startswith("H"):
            out.append(
                BoundaryCurve(curve.branch_id, k * rho[:1], k * z[:1], curve.theta2[:1], curve.theta3[:1], closed=False)
            )
            continue
        name = "WS1" if curve.branch_id == "S1" else "WS2"
        out.append(BoundaryCurve(name, k * rho, k * z, curve.theta2, curve.theta3))
    return out


def _branch_e2(pn: DhParams, k: int):
    def g(t2: float) -> float:
        t3 = _branch_theta3(pn, np.array([t2]), k)
        rho, z = _planar(pn, np.array([t2]), t3)
        return float(_invariants_at(pn, rho, z, t3)[1][0])

    return g


def _cusp_brackets(pn: DhParams, k: int, n: int):
    theta2 = _theta2_grid(n)
    t3 = _branch_theta3(pn, theta2, k)
    rho, z = _planar(pn, theta2, t3)
    e2 = _invariants_at(pn, rho, z, t3)[1]
    sign = np.sign(e2)
    nxt = np.roll(sign, -1)
    idx = np.nonzero(sign * nxt < 0)[0]
    step = 2 * np.pi / n
    return [(theta2[i], theta2[i] + step) for i in idx]


def _feature_at(pn: DhParams, k: int, t2: float, scale_back: float):
    t3 = _branch_theta3(pn, np.array([t2]), k)
    rho, z = _planar(pn, np.array([t2]), t3)
    e1, e2, e3, scale, _ = _invariants_at(pn, rho, z, t3)
    res = MultiplicityInvariants(float(e1[0]), float(e2[0]), float(e3[0]))
    loc = CrossSectionPoint(float(scale_back * rho[0]), float(scale_back * z[0]))
    return loc, res, float(t3[0])


def find_cusps(params: DhParams, n_samples: int = DEFAULT_SAMPLES, branches=("WS1", "WS2")) -> list[BoundaryFeature]:
    """Cusps located by sign changes of e2 along each boundary branch.

    On a double-root curve e1**3 = 27 e2**2, so e1 only touches zero at a
    triple root while e2 crosses it; bisection on e2 pins the cusp.
    Residuals are reported scale-normalized.
    """
    pn = _require_boundary_params(params)
    out = []
    for name in branches:
        k = 1 if name == "WS1" else 0
        g = _branch_e2(pn, k)
        for lo, hi in _cusp_brackets(pn, k, n_samples):
            t2 = brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            loc, res, _ = _feature_at(pn, k, t2, params.a1)
            kind = FeatureKind.QUADRUPLE if abs(res.e3) < FEAT_TOL else FeatureKind.CUSP
            out.append(BoundaryFeature(kind, loc, res, name, (math.remainder(t2, 2 * math.pi),)))
    return out


def _segment_intersections(x: np.ndarray, y: np.ndarray) -> list[tuple[int, int, float, float]]:
    """Proper crossings between non-adjacent segments of a closed polyline.

    Returns (i, j, s, t): segment i at fraction s meets segment j at fraction t.
    """
    n = len(x)
    x1, y1 = x, y
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    out = []
    xmin, xmax = np.minimum(x1, x2), np.maximum(x1, x2)
    ymin, ymax = np.minimum(y1, y2), np.maximum(y1, y2)
    for i in range(n - 2):
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        overlap = (xmin[j] <= xmax[i]) & (xmax[j] >= xmin[i]) & (ymin[j] <= ymax[i]) & (ymax[j] >= ymin[i])
        j = j[overlap]
        if j.size == 0:
            continue
        dx, dy = x2[i] - x1[i], y2[i] - y1[i]
        ex, ey = x2[j] - x1[j], y2[j] - y1[j]
        den = dx * ey - dy * ex
        ok = den != 0.0
        fx, fy = x1[j] - x1[i], y1[j] - y1[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (fx * ey - fy * ex) / den
            t = (fx * dy - fy * dx) / den
        hit = ok & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
        for jj, ss, tt in zip(j[hit], s[hit], t[hit]):
            out.append((i, int(jj), float(ss), float(tt)))
    return out


def _refine_node(pn: DhParams, k: int, ta: float, tb: float):
    """Newton on planar(ta) = planar(tb) along one branch."""
    def F(v):
        t = np.array(v)
        t3 = _branch_theta3(pn, t, k)
        rho, z = _planar(pn, t, t3)
        return np.array([rho[0] - rho[1], z[0] - z[1]])

    v = np.array([ta, tb])
    for _ in range(30):
        f = F(v)
        if np.max(np.abs(f)) < 1e-14:
            break
        h = 1e-7
        J = np.column_stack([(F(v + h * e) - F(v - h * e)) / (2 * h) for e in np.eye(2)])
        try:
            v = v - np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            return None
    if np.max(np.abs(F(v))) > 1e-10:
        return None
    return v


def find_nodes(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> list[BoundaryFeature]:
    """Self-intersections of the internal boundary, each holding two double roots."""
    pn = _require_boundary_params(params)
    theta2 = _theta2_grid(n_samples)
    rho, z = _planar(pn, theta2, _branch_theta3(pn, theta2, 1))
    step = 2 * np.pi / n_samples
    out: list[BoundaryFeature] = []
    for i, j, s, t in _segment_intersections(rho, z):
        v = _refine_node(pn, 1, theta2[i] + s * step, theta2[j] + t * step)
        if v is None or abs(math.remainder(v[0] - v[1], 2 * math.pi)) < 1e-6:
            continue
        t3 = _branch_theta3(pn, v, 1)
        ta, tb = np.tan(t3 / 2)
        if abs(ta - tb) <= 1e-6 * max(1.0, abs(ta)):
            continue
        loc, res, _ = _feature_at(pn, 1, float(v[0]), params.a1)
        if any(abs(f.location.rho - loc.rho) + abs(f.location.z - loc.z) < 1e-8 for f in out):
            continue
        out.append(BoundaryFeature(FeatureKind.NODE, loc, res, "WS1", tuple(float(math.remainder(x, 2 * math.pi)) for x in v)))
    return out


def find_features(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> list[BoundaryFeature]:
    return find_cusps(params, n_samples) + find_nodes(params, n_samples)


def has_cusp(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> bool:
    """Cheap cusp test on the internal boundary: any sign change of e2."""
    pn = _require_boundary_params(params)
    return bool(_cusp_brackets(pn, 1, n_samples))


def numerical_classify(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> Verdict:
    """Classify by scanning the internal boundary for a cusp.

    Manipulators with a3 >= a2 are quaternary outright.  Otherwise a cusp on
    WS1 (a triple root of the quartic) means quaternary and its absence
    binary.  With d3 != 0 the boundary parameterization does not apply and
    the grid oracle decides instead.
    """
    if params.d3 != 0.0:
        return Verdict.QUATERNARY if grid_iks_oracle(params) == 4 else Verdict.BINARY
    if params.a3 >= params.a2:
        return Verdict.QUATERNARY
    return Verdict.QUATERNARY if has_cusp(params, n_samples) else Verdict.BINARY


def grid_iks_oracle(params: DhParams, grid_res: int = DEFAULT_GRID_RES, sampling: str = "joint") -> int:
    """Largest number of distinct IK solutions found on a sampling grid.

    ``sampling="joint"`` (default) counts solutions at the images of a
    refining (theta2, theta3) grid, coarse to fine, up to ``grid_res`` steps
    per turn; images crowd near the boundaries, which is where small 4-IKS
    lobes live.  ``sampling="workspace"`` uses a plain rectangular grid over
    rho in [0, reach], z in [-reach, reach] with ``grid_res`` rows.  Points too
    close to a boundary to call are ignored.
    """
    pn = normalize(params)
    if sampling == "joint":
        return int(_core.max_iks_joint_grid(pn.a2, pn.a3, pn.d2, pn.d3, grid_res))
    if sampling != "workspace":
        raise ValueError(f"unknown sampling {sampling!r}")
    reach = pn.reach
    rho = np.linspace(0.0, reach, grid_res)
    z = np.linspace(-reach, reach, 2 * grid_res)
    R, Z = np.meshgrid(rho, z)
    counts = _core.count_iks_points(pn.a2, pn.a3, pn.d2, pn.d3, R.ravel(), Z.ravel())
    return int(counts.max())


def _quad_objective(pn: DhParams, k: int):
    def f(t2: float) -> float:
        t = np.array([t2])
        t3 = _branch_theta3(pn, t, k)
        rho, z = _planar(pn, t, t3)
        e1, e2, e3, _, _ = _invariants_at(pn, rho, z, t3)
        return float(abs(e1[0]) + abs(e2[0]) + abs(e3[0]))

    return f


def quadruple_point_search(params: DhParams, n_samples: int = DEFAULT_SAMPLES) -> Optional[QuadruplePoint]:
    """Boundary point closest to having four coincident IK solutions.

    Minimizes |e1| + |e2| + |e3| (scale-normalized) over both boundary
    branches: a coarse scan, then bounded Brent refinement around the best
    local minima.  Residuals come back raw, with the coefficient scale, so
    the caller decides what counts as zero.
    """
    pn = _require_boundary_params(params)
    theta2 = _theta2_grid(n_samples)
    step = 2 * np.pi / n_samples
    best = None
    for k in (1, 0):
        t3 = _branch_theta3(pn, theta2, k)
        rho, z = _planar(pn, theta2, t3)
        e1, e2, e3, _, _ = _invariants_at(pn, rho, z, t3)
        obj = np.abs(e1) + np.abs(e2) + np.abs(e3)
        local = np.nonzero((obj <= np.roll(obj, 1)) & (obj <= np.roll(obj, -1)))[0]
        local = local[np.argsort(obj[local])][:4]
        f = _quad_objective(pn, k)
        for i in local:
            r = minimize_scalar(
                f, bounds=(theta2[i] - step, theta2[i] + step), method="bounded", options={"xatol": 1e-13}
            )
            if best is None or r.fun < best[0]:
                best = (float(r.fun), k, float(r.x))
    if best is None:
        return None
    _, k, t2 = best
    t = np.array([t2])
    t3 = _branch_theta3(pn, t, k)
    rho, z = _planar(pn, t, t3)
    _, _, _, _, c = _invariants_at(pn, rho, z, t3)
    c = c[:, 0]
    e = MultiplicityInvariants(*(float(v) for v in invariants_array(*c)))
    return QuadruplePoint(
        CrossSectionPoint(float(params.a1 * rho[0]), float(params.a1 * z[0])),
        e,
        max(1.0, float(np.max(np.abs(c)))),
        float(math.remainder(t2, 2 * math.pi)),
        float(t3[0]),
    )


def _inside_even_odd(px: np.ndarray, py: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Even-odd rule: horizontal ray casting against a closed polyline."""
    inside = np.zeros(px.shape, dtype=bool)
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    for xa, ya, xb, yb in zip(x, y, x2, y2):
        crosses = (ya > py) != (yb > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = xa + (py - ya) * (xb - xa) / (yb - ya)
        inside ^= crosses & (px < xi)
    return inside


def region_probes(params: DhParams, n_samples: int = 512, raster: int = 200) -> dict[str, CrossSectionPoint]:
    """Representative points of the regions cut out by the boundaries.

    ``inner``: inside the internal boundary; ``outer``: inside the external
    boundary but outside the internal one.  Each probe is the raster point
    of its class farthest from every boundary sample.
    """
    curves = {c.branch_id: c for c in boundary_cross_section(params, n_samples) if c.closed}
    ws1, ws2 = curves["WS1"], curves["WS2"]
    allx = np.concatenate([ws1.rho, ws2.rho])
    ally = np.concatenate([ws1.z, ws2.z])
    gx, gy = np.meshgrid(
        np.linspace(allx.min(), allx.max(), raster), np.linspace(ally.min(), ally.max(), raster)
    )
    px, py = gx.ravel(), gy.ravel()
    in1 = _inside_even_odd(px, py, ws1.rho, ws1.z)
    in2 = _inside_even_odd(px, py, ws2.rho, ws2.z)
    d = np.full(px.shape, np.inf)
    for bx, by in zip(allx, ally):
        np.minimum(d, np.hypot(px - bx, py - by), out=d)
    probes = {}
    for name, mask in (("inner", in1 & in2), ("outer", in2 & ~in1)):
        if mask.any():
            i = np.argmax(np.where(mask, d, -1.0))
            probes[name] = CrossSectionPoint(max(0.0, float(px[i])), float(py[i]))
    return probes


def boundary_det_residual(params: DhParams, curve: JointCurve) -> float:
    """Largest |reduced det J| over a joint curve's samples."""
    return float(np.max(np.abs(jacobian_det_array(normalize(params), curve.theta2, curve.theta3))))
