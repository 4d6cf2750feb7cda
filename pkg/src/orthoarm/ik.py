"""Quartic inverse kinematics in t = tan(theta3 / 2).

The polynomial is written with binomial weights,

    P(t) = C0 t^4 + 4 C1 t^3 + 6 C2 t^2 + 4 C3 t + C4,

and depends on the target point only through the two invariants
V = -|p|^2 - a1^2 + a2^2 + d2^2 + a3^2 + d3^2 and R = x^2 + y^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import (
    CartesianPoint,
    CrossSectionPoint,
    DhParams,
    JointConfig,
    forward_kinematics,
    normalize,
    planar_position,
)

DEFAULT_CLUSTER_TOL = 1e-6
INVARIANT_TOL = 1e-9
LEADING_TOL = 1e-12
IMAG_TOL = 1e-7
DISC_TOL = 1e-13


class IdenticallyZeroError(ArithmeticError):
    """The inverse-kinematics polynomial vanishes identically."""


class PointInvariants(NamedTuple):
    V: float
    R: float


class QuarticCoeffs(NamedTuple):
    c0: float
    c1: float
    c2: float
    c3: float
    c4: float

    @property
    def scale(self) -> float:
        return max(1.0, *(abs(c) for c in self))

    def weighted(self) -> np.ndarray:
        """Plain power-basis coefficients, highest degree first."""
        return np.array([self.c0, 4 * self.c1, 6 * self.c2, 4 * self.c3, self.c4])

    def __call__(self, t):
        c0, c1, c2, c3, c4 = self
        return (((c0 * t + 4 * c1) * t + 6 * c2) * t + 4 * c3) * t + c4


class MultiplicityInvariants(NamedTuple):
    """Left-hand sides of the quadruple-root conditions.

    ``e1`` and ``e2`` are the two classical invariants of the quartic form
    (the discriminant is proportional to e1**3 - 27 e2**2) and ``e3`` is the
    leading coefficient of its Hessian.
    """

    e1: float
    e2: float
    e3: float

    def normalized(self, scale: float) -> MultiplicityInvariants:
        return MultiplicityInvariants(self.e1 / scale**2, self.e2 / scale**3, self.e3 / scale**2)


@dataclass(frozen=True)
class RootCluster:
    """A real root of the quartic and how many roots coincide there.

    ``value`` is ``math.inf`` for the root at infinity (theta3 = pi).
    """

    value: float
    multiplicity: int

    @property
    def at_infinity(self) -> bool:
        return math.isinf(self.value)

    @property
    def theta3(self) -> float:
        return -math.pi if self.at_infinity else 2.0 * math.atan(self.value)


def point_invariants(params: DhParams, p: CartesianPoint) -> PointInvariants:
    R = p.x * p.x + p.y * p.y
    V = (
        -R
        - p.z * p.z
        - params.a1**2
        + params.a2**2
        + params.d2**2
        + params.a3**2
        + params.d3**2
    )
    return PointInvariants(V, R)


def coeffs_from_invariants(a2, a3, d2, V, R):
    """C0..C4 for a normalized chain; broadcasts over array inputs."""
    a2a3 = a2 * a3
    v2 = V * V
    c0 = a2a3 * a2a3 - a2a3 * V - R + v2 / 4 + d2 * d2
    c1 = a3 * d2 * (-2 * a2a3 + V + 2) / 2
    c2 = (
        -a2a3 * a2a3 / 3
        + 2 * a3 * a3 * d2 * d2 / 3
        + 2 * a3 * a3 / 3
        - R / 3
        + v2 / 12
        + d2 * d2 / 3
    )
    c3 = a3 * d2 * (2 * a2a3 + V + 2) / 2
    c4 = a2a3 * a2a3 + a2a3 * V - R + v2 / 4 + d2 * d2
    return c0, c1, c2, c3, c4


def quartic_coeffs(params: DhParams, p: CartesianPoint) -> QuarticCoeffs:
    """Coefficients of the inverse-kinematics quartic at point ``p``.

    ``params`` must be normalized (a1 = 1); use :func:`quartic_at` for the
    general case.
    """
    if not params.normalized:
        raise ValueError("quartic_coeffs expects normalized parameters (a1 = 1)")
    V, R = point_invariants(params, p)
    return QuarticCoeffs(*(float(c) for c in coeffs_from_invariants(params.a2, params.a3, params.d2, V, R)))


def quartic_at(params: DhParams, p: CartesianPoint) -> QuarticCoeffs:
    """Quartic for arbitrary a1 > 0, computed on the normalized chain."""
    k = 1.0 / params.a1
    return quartic_coeffs(normalize(params), p.scaled(k))


def invariants_array(c0, c1, c2, c3, c4):
    e1 = c0 * c4 - 4 * c1 * c3 + 3 * c2 * c2
    e2 = c0 * c2 * c4 + 2 * c1 * c2 * c3 - c0 * c3 * c3 - c1 * c1 * c4 - c2 * c2 * c2
    e3 = c0 * c2 - c1 * c1
    return e1, e2, e3


def rotate_coeffs(c0, c1, c2, c3, c4, phi):
    """Weighted coefficients of the same quartic in u = tan((theta3 - phi)/2).

    A shift of theta3 acts on the binary form by a rotation, so e1 and e2
    are unchanged while e3 (the leading Hessian coefficient) now probes the
    direction theta3 = phi + pi instead of theta3 = pi.
    """
    c, s = np.cos(0.5 * np.asarray(phi)), np.sin(0.5 * np.asarray(phi))
    cs = np.broadcast_arrays(c0, c1, c2, c3, c4, c, s)
    c, s = cs[5], cs[6]
    # ascending powers of u of (c u + s)^m and (c - s u)^m
    lin_a, lin_b = [[np.ones_like(c)]], [[np.ones_like(c)]]
    for m in range(4):
        lin_a.append(_times_linear(lin_a[-1], s, c))
        lin_b.append(_times_linear(lin_b[-1], c, -s))
    out = [np.zeros_like(c) for _ in range(5)]
    for k, (ck, w) in enumerate(zip(cs[:5], (1, 4, 6, 4, 1))):
        prod = _poly_mul(lin_a[4 - k], lin_b[k])
        for j in range(5):
            out[j] = out[j] + w * ck * prod[j]
    # out[j] multiplies u^j; P = D0 u^4 + 4 D1 u^3 + 6 D2 u^2 + 4 D3 u + D4
    return out[4], out[3] / 4, out[2] / 6, out[1] / 4, out[0]


def _times_linear(poly, b0, b1):
    res = [b0 * poly[0]]
    for j in range(1, len(poly)):
        res.append(b0 * poly[j] + b1 * poly[j - 1])
    res.append(b1 * poly[-1])
    return res


def _poly_mul(p, q):
    res = [0.0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            res[i + j] = res[i + j] + a * b
    return res


def multiplicity_invariants(c: QuarticCoeffs) -> MultiplicityInvariants:
    return MultiplicityInvariants(*(float(e) for e in invariants_array(*c)))


def _polish(poly: np.ndarray, r: float, order: int) -> float:
    """One Newton step on the ``order``-th derivative, which has a simple root at a root of that multiplicity."""
    d = np.polyder(poly, order) if order else poly
    dd = np.polyder(d)
    f, fp = np.polyval(d, r), np.polyval(dd, r)
    if fp != 0.0 and math.isfinite(f / fp):
        step = f / fp
        if abs(step) <= 1e-3 * max(1.0, abs(r)):
            return r - step
    return r


def _chordal(z: complex, w: complex) -> float:
    """Chordal distance; for real t it is |sin| of half the theta3 gap."""
    return abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def _group(roots: np.ndarray, tol: float) -> list[list[complex]]:
    """Single-linkage grouping of roots closer than ``tol`` in chordal distance.

    Measuring the gap in theta3 rather than in t keeps a double root near
    theta3 = pi, where t is large and poorly conditioned, in one cluster.
    """
    order = sorted(roots, key=lambda z: (z.real, z.imag))
    groups: list[list[complex]] = []
    for z in order:
        for g in groups:
            if any(_chordal(z, w) <= tol for w in g):
                g.append(z)
                break
        else:
            groups.append([z])
    return groups


def solve_quartic_real(c: QuarticCoeffs, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[RootCluster]:
    """Real roots of the quartic grouped into clusters of coincident roots.

    Roots come from the companion-matrix eigenvalues followed by a Newton
    polish.  Clusters are formed from roots closer than ``cluster_tol``
    (chordal distance, i.e. relative to 1 + |t|); when the invariants say the form is degenerate the grouping is
    widened until it matches (a triple root splits by ~eps**(1/3), far more
    than any fixed tolerance).  A vanishing leading coefficient drops the
    degree and yields a cluster at ``math.inf``.
    """
    coeffs = np.asarray(c, dtype=float)
    scale = float(np.max(np.abs(coeffs)))
    if scale == 0.0:
        raise IdenticallyZeroError("all quartic coefficients vanish")
    cn = QuarticCoeffs(*(coeffs / scale))
    poly = cn.weighted()
    e1, e2, e3 = invariants_array(*cn)

    n_inf = 0
    while n_inf < 4 and abs(poly[n_inf]) < LEADING_TOL:
        n_inf += 1
    finite = poly[n_inf:]
    roots = np.roots(finite) if len(finite) > 1 else np.array([], dtype=complex)

    # expected multiplicity structure from the invariants
    quad = abs(e1) < INVARIANT_TOL and abs(e2) < INVARIANT_TOL and abs(e3) < INVARIANT_TOL
    triple = abs(e1) < INVARIANT_TOL and abs(e2) < INVARIANT_TOL
    disc = e1**3 - 27 * e2**2
    double = abs(disc) < DISC_TOL * max(abs(e1) ** 3 + 27 * e2**2, 1e-300)

    if n_inf:
        # degree drop: theta3 = pi solves the chain; finite roots clustered plainly
        clusters = [RootCluster(math.inf, n_inf)]
        for g in _group(roots, cluster_tol):
            z = sum(g) / len(g)
            if abs(z.imag) <= IMAG_TOL * max(1.0, abs(z)):
                clusters.append(RootCluster(_polish(finite, float(z.real), len(g) - 1), len(g)))
        return sorted(clusters, key=lambda k: k.value)

    clusters: list[RootCluster] = []
    if quad:
        r = -cn.c1 / cn.c0
        return [RootCluster(float(r), 4)]

    if triple:
        h2, h1 = cn.c0 * cn.c2 - cn.c1**2, cn.c0 * cn.c3 - cn.c1 * cn.c2
        if abs(h2) > INVARIANT_TOL:
            r = -h1 / (2 * h2)
            s = -4 * cn.c1 / cn.c0 - 3 * r
            r = _polish(poly, r, 2)
            s = _polish(poly, s, 0)
            if _chordal(r, s) > cluster_tol:
                return sorted([RootCluster(float(r), 3), RootCluster(float(s), 1)], key=lambda k: k.value)

    tol = cluster_tol
    groups = _group(roots, tol)
    if double and all(len(g) == 1 for g in groups) and len(roots) >= 2:
        # merge the closest pair (node or fold point seen at finite precision)
        best = None
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                d = _chordal(roots[i], roots[j])
                if best is None or d < best[0]:
                    best = (d, i, j)
        _, i, j = best
        rest = [roots[k] for k in range(len(roots)) if k not in (i, j)]
        groups = [[roots[i], roots[j]]] + [[z] for z in rest]
        # two double roots: the remaining pair may coincide as well
        if len(rest) == 2 and _chordal(rest[0], rest[1]) <= math.sqrt(tol):
            groups = [[roots[i], roots[j]], rest]

    for g in groups:
        m = len(g)
        z = sum(g) / m
        if abs(z.imag) > IMAG_TOL * max(1.0, abs(z)):
            continue
        r = _polish(finite, float(z.real), m - 1)
        clusters.append(RootCluster(float(r), m))
    clusters.sort(key=lambda k: k.value)
    return clusters


def count_iks(params: DhParams, sp: CrossSectionPoint) -> int:
    """Number of distinct inverse kinematic solutions at a cross-section point."""
    c = quartic_at(params, sp.to_cartesian())
    try:
        return len(solve_quartic_real(c))
    except IdenticallyZeroError:
        return 0


def _theta2_candidates(params: DhParams, p: CartesianPoint, theta3: float, tol: float):
    """Solve the two equations linear in (cos theta2, sin theta2)."""
    a1, a2, a3, d2, d3 = params.as_tuple()
    c3, s3 = math.cos(theta3), math.sin(theta3)
    w = a2 + a3 * c3
    y0 = d2 + a3 * s3
    rho2 = p.x * p.x + p.y * p.y
    K = (rho2 - a1 * a1 - y0 * y0 - (w * w + d3 * d3 - p.z * p.z)) / (2 * a1)
    det = w * w + d3 * d3
    if det <= tol:
        # operation point on the second joint axis: theta2 is free
        return [0.0], True
    # [w d3; d3 -w] [c2 s2]^T = [K z]^T
    c2 = (w * K + d3 * p.z) / det
    s2 = (d3 * K - w * p.z) / det
    return [math.atan2(s2, c2)], False


def _refine(params: DhParams, p: CartesianPoint, q: np.ndarray) -> np.ndarray:
    """Gauss-Newton steps on the position map; skipped near singularities."""
    from .geometry import fk_array

    target = p.as_array()
    for _ in range(2):
        r = fk_array(params, q) - target
        J = np.empty((3, 3))
        h = 1e-7
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            J[:, i] = (fk_array(params, q + e) - fk_array(params, q - e)) / (2 * h)
        if abs(np.linalg.det(J)) < 1e-6 * max(1.0, params.reach) ** 3:
            break
        q = q - np.linalg.solve(J, r)
    return q


def inverse_kinematics(params: DhParams, p: CartesianPoint, tol: float = 1e-8) -> list[JointConfig]:
    """All joint configurations placing the operation point at ``p``.

    ``tol`` is the accepted position residual, relative to the chain size.
    """
    if params.a1 <= 0.0:
        raise ValueError("inverse_kinematics needs a1 > 0")
    if math.sqrt(p.x**2 + p.y**2 + p.z**2) > params.reach * (1 + 1e-12):
        return []
    c = quartic_at(params, p)
    try:
        clusters = solve_quartic_real(c)
    except IdenticallyZeroError:
        return []
    scale = max(1.0, params.reach)
    out: list[JointConfig] = []
    for theta3, simple in _theta3_candidates(c, clusters):
        theta2s, degenerate = _theta2_candidates(params, p, theta3, 1e-12 * scale**2)
        for theta2 in theta2s:
            x0, y0, _ = planar_position(params, theta2, theta3)
            theta1 = math.atan2(p.y, p.x) - math.atan2(y0, x0)
            q = np.array([theta1, theta2, theta3])
            if simple and not degenerate:
                q = _refine(params, p, q)
            cand = JointConfig(*q, degenerate=degenerate)
            resid = np.linalg.norm(forward_kinematics(params, cand).as_array() - p.as_array())
            if resid < tol * scale and not any(_same(cand, o) for o in out):
                out.append(cand)
    return out


def _theta3_candidates(c: QuarticCoeffs, clusters: list[RootCluster]):
    """Cluster roots first, then the raw near-real eigenvalues.

    Two solutions a hair apart near a singularity share one cluster; feeding
    the individual roots as well lets the position residual sort them out.
    """
    for cl in clusters:
        yield cl.theta3, cl.multiplicity == 1
    if all(cl.multiplicity == 1 for cl in clusters):
        return
    coeffs = np.asarray(c, dtype=float) / max(abs(v) for v in c)
    poly = QuarticCoeffs(*coeffs).weighted()
    if abs(poly[0]) < LEADING_TOL:
        return
    for z in np.roots(poly):
        if abs(z.imag) <= 1e-4 * max(1.0, abs(z)):
            yield 2.0 * math.atan(_polish(poly, float(z.real), 0)), True


def _same(a: JointConfig, b: JointConfig, tol: float = 1e-9) -> bool:
    return all(
        abs(math.remainder(x - y, 2 * math.pi)) < tol for x, y in zip(a.as_tuple(), b.as_tuple())
    )
