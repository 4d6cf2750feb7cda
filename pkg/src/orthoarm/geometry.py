"""Orthogonal 3R chain: parameters, forward kinematics and singularities.

The family is fixed by the twists alpha1 = -90 deg, alpha2 = +90 deg and the
base offset d1 = 0.  Frames follow the standard (distal) Denavit-Hartenberg
convention ``Rz(theta_i) Tz(d_i) Tx(a_i) Rx(alpha_i)`` and the operation point
is the origin of frame 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    w = math.fmod(theta + math.pi, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    w -= math.pi
    # fmod can land exactly on +pi after the shift
    return -math.pi if w >= math.pi else w


@dataclass(frozen=True)
class DhParams:
    """Length parameters of an orthogonal 3R manipulator."""

    a1: float
    a2: float
    a3: float
    d2: float
    d3: float = 0.0

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "a3", "d2", "d3"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def normalized(self) -> bool:
        return self.a1 == 1.0

    @property
    def reach(self) -> float:
        """Upper bound on the distance of the operation point from the base."""
        return self.a1 + self.a2 + self.a3 + self.d2 + self.d3

    def scaled(self, k: float) -> DhParams:
        return DhParams(k * self.a1, k * self.a2, k * self.a3, k * self.d2, k * self.d3)

    def with_(self, **changes: float) -> DhParams:
        return replace(self, **changes)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.d2, self.d3)


@dataclass(frozen=True)
class JointConfig:
    """Joint angles in radians, wrapped into [-pi, pi).

    ``degenerate`` marks inverse-kinematic solutions picked from a continuum
    (operation point on the second joint axis).
    """

    theta1: float
    theta2: float
    theta3: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        for name in ("theta1", "theta2", "theta3"):
            object.__setattr__(self, name, wrap_angle(float(getattr(self, name))))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("Cartesian coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def scaled(self, k: float) -> CartesianPoint:
        return CartesianPoint(k * self.x, k * self.y, k * self.z)


@dataclass(frozen=True)
class CrossSectionPoint:
    """Point of the workspace half cross-section (rho, z)."""

    rho: float
    z: float

    def __post_init__(self) -> None:
        if not self.rho >= 0.0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")

    def to_cartesian(self) -> CartesianPoint:
        # theta1 symmetry makes the azimuth free; x = rho, y = 0
        return CartesianPoint(self.rho, 0.0, self.z)


def normalize(params: DhParams) -> DhParams:
    """Divide every length by a1 so that a1 = 1."""
    if params.a1 <= 0.0:
        raise ValueError("normalization needs a1 > 0")
    if params.a1 == 1.0:
        return params
    k = 1.0 / params.a1
    return DhParams(1.0, k * params.a2, k * params.a3, k * params.d2, k * params.d3)


def dh_transform(theta: float, d: float, a: float, alpha: float) -> np.ndarray:
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def chain_transforms(params: DhParams, q: JointConfig) -> list[np.ndarray]:
    """Base-to-frame transforms of frames 1, 2 and 3."""
    links = (
        (q.theta1, 0.0, params.a1, -math.pi / 2),
        (q.theta2, params.d2, params.a2, math.pi / 2),
        (q.theta3, params.d3, params.a3, 0.0),
    )
    out = []
    T = np.eye(4)
    for link in links:
        T = T @ dh_transform(*link)
        out.append(T)
    return out


def planar_position(params: DhParams, theta2: float, theta3: float) -> tuple[float, float, float]:
    """Operation point for theta1 = 0, returned as (x0, y0, z)."""
    c2, s2 = math.cos(theta2), math.sin(theta2)
    c3, s3 = math.cos(theta3), math.sin(theta3)
    w = params.a2 + params.a3 * c3
    x0 = params.a1 + w * c2 + params.d3 * s2
    y0 = params.d2 + params.a3 * s3
    z = -w * s2 + params.d3 * c2
    return x0, y0, z


def forward_kinematics(params: DhParams, q: JointConfig) -> CartesianPoint:
    """Position of the operation point in the base frame.

    Closed form of the product of the three DH transforms; agrees with
    ``chain_transforms(params, q)[-1][:3, 3]``.
    """
    x0, y0, z = planar_position(params, q.theta2, q.theta3)
    c1, s1 = math.cos(q.theta1), math.sin(q.theta1)
    return CartesianPoint(c1 * x0 - s1 * y0, s1 * x0 + c1 * y0, z)


def fk_array(params: DhParams, q: np.ndarray) -> np.ndarray:
    """Vectorized forward kinematics on an (..., 3) array of joint angles."""
    q = np.asarray(q, dtype=float)
    t1, t2, t3 = q[..., 0], q[..., 1], q[..., 2]
    c2, s2, c3, s3 = np.cos(t2), np.sin(t2), np.cos(t3), np.sin(t3)
    w = params.a2 + params.a3 * c3
    x0 = params.a1 + w * c2 + params.d3 * s2
    y0 = params.d2 + params.a3 * s3
    z = -w * s2 + params.d3 * c2
    c1, s1 = np.cos(t1), np.sin(t1)
    return np.stack([c1 * x0 - s1 * y0, s1 * x0 + c1 * y0, z], axis=-1)


def jacobian_det(params: DhParams, q: JointConfig) -> float:
    """Reduced Jacobian determinant; zero exactly at singular configurations.

    For d3 = 0 this is ``(a2 + c3 a3)(c2 (s3 a2 - c3 d2) + s3 a1)``.  The true
    determinant of the position map equals ``a3`` times this value.  The d3
    terms extend the same reduction to a nonzero last offset.
    """
    return float(jacobian_det_array(params, q.theta2, q.theta3))


def jacobian_det_array(params: DhParams, theta2, theta3):
    c2, s2 = np.cos(theta2), np.sin(theta2)
    c3, s3 = np.cos(theta3), np.sin(theta3)
    a1, a2, a3, d2, d3 = params.as_tuple()
    w = a2 + c3 * a3
    det = w * (c2 * (s3 * a2 - c3 * d2) + s3 * a1)
    if d3:
        det = det + d3 * s2 * (w * s3 - c3 * (a3 * s3 + d2))
    return det


def numerical_jacobian(params: DhParams, q: JointConfig, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the position map."""
    base = np.array(q.as_tuple())
    J = np.empty((3, 3))
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        J[:, i] = (fk_array(params, base + step) - fk_array(params, base - step)) / (2 * h)
    return J


def cross_section(p: CartesianPoint) -> CrossSectionPoint:
    return CrossSectionPoint(math.hypot(p.x, p.y), p.z)
