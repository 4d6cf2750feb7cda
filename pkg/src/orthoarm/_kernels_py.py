"""NumPy versions of the compiled kernels, used when the extension is absent."""

from __future__ import annotations

import numpy as np

from .ik import coeffs_from_invariants, invariants_array


def count_iks_points(a2, a3, d2, d3, rho, z, ambig_tol=1e-6):
    """Distinct real IK solutions at each (rho, z); -1 where too close to call.

    Uses the sign of the discriminant and, when it is positive, the Hessian
    test separating four real roots from none.  Points whose discriminant is
    within ``ambig_tol`` of zero (relative) sit on a boundary and are not
    counted either way.
    """
    rho = np.asarray(rho, dtype=float)
    z = np.asarray(z, dtype=float)
    R = rho * rho
    V = -R - z * z - 1.0 + a2 * a2 + d2 * d2 + a3 * a3 + d3 * d3
    c = np.array(coeffs_from_invariants(a2, a3, d2, V, R))
    s = np.max(np.abs(c), axis=0)
    zero = s == 0.0
    c = c / np.where(zero, 1.0, s)
    e1, e2, h = invariants_array(*c)
    disc = e1**3 - 27 * e2**2
    mag = np.abs(e1) ** 3 + 27 * e2**2
    four = (h < 0) & (12 * h * h - c[0] ** 2 * e1 > 0)
    out = np.where(disc < 0, 2, np.where(four, 4, 0)).astype(np.int8)
    out[(np.abs(disc) <= ambig_tol * mag) | zero] = -1
    return out


def max_iks_joint_grid(a2, a3, d2, d3, n_max=1024, n_min=32, ambig_tol=1e-6):
    """Largest confident IK count over images of a refining joint grid."""
    best = -1
    half = d3 == 0.0
    n = n_min
    first = True
    while n <= n_max:
        step = 2 * np.pi / n
        jmax = n // 2 + 1 if half else n
        i = np.arange(n)
        j = np.arange(jmax)
        I, J = np.meshgrid(i, j, indexing="ij")
        if not first:
            keep = ~((I % 2 == 0) & (J % 2 == 0))
            I, J = I[keep], J[keep]
        t3 = -np.pi + I * step
        t2 = J * step if half else -np.pi + J * step
        c3, s3, c2, s2 = np.cos(t3), np.sin(t3), np.cos(t2), np.sin(t2)
        w = a2 + a3 * c3
        x0 = 1.0 + w * c2 + d3 * s2
        y0 = d2 + a3 * s3
        zz = -w * s2 + d3 * c2
        counts = count_iks_points(a2, a3, d2, d3, np.hypot(x0, y0), zz, ambig_tol)
        if counts.size:
            best = max(best, int(counts.max()))
        if best == 4:
            return 4
        first = False
        n *= 2
    return best
