# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: counting real roots of the IK quartic on many points."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs, M_PI

cnp.import_array()


cdef inline int _count(double a2, double a3, double d2, double d3,
                       double rho, double z, double tol) nogil:
    cdef double R = rho * rho
    cdef double V = -R - z * z - 1.0 + a2 * a2 + d2 * d2 + a3 * a3 + d3 * d3
    cdef double p = a2 * a3
    cdef double v2 = V * V
    cdef double c0 = p * p - p * V - R + v2 / 4 + d2 * d2
    cdef double c1 = a3 * d2 * (-2 * p + V + 2) / 2
    cdef double c2 = (-p * p / 3 + 2 * a3 * a3 * d2 * d2 / 3 + 2 * a3 * a3 / 3
                      - R / 3 + v2 / 12 + d2 * d2 / 3)
    cdef double c3 = a3 * d2 * (2 * p + V + 2) / 2
    cdef double c4 = p * p + p * V - R + v2 / 4 + d2 * d2
    cdef double s = fabs(c0)
    if fabs(c1) > s: s = fabs(c1)
    if fabs(c2) > s: s = fabs(c2)
    if fabs(c3) > s: s = fabs(c3)
    if fabs(c4) > s: s = fabs(c4)
    if s == 0.0:
        return -1
    c0 /= s; c1 /= s; c2 /= s; c3 /= s; c4 /= s
    cdef double e1 = c0 * c4 - 4 * c1 * c3 + 3 * c2 * c2
    cdef double e2 = c0 * c2 * c4 + 2 * c1 * c2 * c3 - c0 * c3 * c3 - c1 * c1 * c4 - c2 * c2 * c2
    cdef double h = c0 * c2 - c1 * c1
    cdef double disc = e1 * e1 * e1 - 27 * e2 * e2
    cdef double mag = fabs(e1 * e1 * e1) + 27 * e2 * e2
    if fabs(disc) <= tol * mag:
        return -1
    if disc < 0:
        return 2
    if h < 0 and 12 * h * h - c0 * c0 * e1 > 0:
        return 4
    return 0


def count_iks_points(double a2, double a3, double d2, double d3,
                     rho, z, double ambig_tol=1e-6):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r = np.ascontiguousarray(rho, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef Py_ssize_t n = r.shape[0], i
    if zz.shape[0] != n:
        raise ValueError("rho and z must have the same size")
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.empty(n, dtype=np.int8)
    with nogil:
        for i in range(n):
            out[i] = _count(a2, a3, d2, d3, r[i], zz[i], ambig_tol)
    return out.reshape(np.shape(rho))


def max_iks_joint_grid(double a2, double a3, double d2, double d3,
                       int n_max=1024, int n_min=32, double ambig_tol=1e-6):
    cdef int n = n_min, i, j, jmax, c, best = -1
    cdef double step, t2, t3, c2, s2, c3, s3, w, x0, y0, z, rho
    cdef bint half = d3 == 0.0
    cdef bint first = True
    with nogil:
        while n <= n_max:
            step = 2 * M_PI / n
            # theta2 -> -theta2 mirrors z when d3 = 0
            jmax = n // 2 + 1 if half else n
            for i in range(n):
                t3 = -M_PI + i * step
                c3 = cos(t3)
                s3 = sin(t3)
                w = a2 + a3 * c3
                y0 = d2 + a3 * s3
                for j in range(jmax):
                    if not first and i % 2 == 0 and j % 2 == 0:
                        continue
                    t2 = (j * step) if half else (-M_PI + j * step)
                    c2 = cos(t2)
                    s2 = sin(t2)
                    x0 = 1.0 + w * c2 + d3 * s2
                    z = -w * s2 + d3 * c2
                    rho = sqrt(x0 * x0 + y0 * y0)
                    c = _count(a2, a3, d2, d3, rho, z, ambig_tol)
                    if c > best:
                        best = c
                        if best == 4:
                            break
                if best == 4:
                    break
            if best == 4:
                break
            first = False
            n *= 2
    return best
