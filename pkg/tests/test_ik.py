import math

import numpy as np
import pytest

from orthoarm.geometry import CartesianPoint, CrossSectionPoint, DhParams, JointConfig, cross_section, forward_kinematics
from orthoarm.ik import (
    IdenticallyZeroError,
    QuarticCoeffs,
    count_iks,
    inverse_kinematics,
    multiplicity_invariants,
    point_invariants,
    quartic_at,
    quartic_coeffs,
    rotate_coeffs,
    solve_quartic_real,
)
from orthoarm.workspace import region_probes, singularity_curves

FOUR_CUSP_ARM = DhParams(1, 2, 1.5, 1)


def from_roots(*roots):
    """Weighted coefficients of the monic quartic with the given roots."""
    c = np.poly(roots)
    return QuarticCoeffs(c[0], c[1] / 4, c[2] / 6, c[3] / 4, c[4])


def test_point_invariants_examples():
    assert point_invariants(FOUR_CUSP_ARM, CartesianPoint(0, 0, 0)) == (6.25, 0.0)
    assert point_invariants(FOUR_CUSP_ARM, CartesianPoint(1, 0, 0)) == (5.25, 1.0)
    assert point_invariants(FOUR_CUSP_ARM.with_(d3=2), CartesianPoint(1, 0, 0)).V == 9.25


def test_coefficient_identities(rng):
    for _ in range(100):
        p = DhParams(1, *rng.uniform(0.1, 3, 3))
        pt = CartesianPoint(*rng.uniform(-3, 3, 3))
        c = quartic_coeffs(p, pt)
        V, _ = point_invariants(p, pt)
        assert math.isclose(c.c0 - c.c4, -2 * p.a2 * p.a3 * V, rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(c.c3 - c.c1, 2 * p.a2 * p.a3**2 * p.d2, rel_tol=1e-12, abs_tol=1e-12)


def test_quartic_coeffs_requires_normalized():
    with pytest.raises(ValueError):
        quartic_coeffs(DhParams(2, 1, 1, 1), CartesianPoint(0, 0, 0))


def test_fk_configuration_is_root(rng):
    for _ in range(300):
        p = DhParams(*rng.uniform(0.1, 3, 4), d3=rng.choice([0.0, rng.uniform(0, 2)]))
        q = JointConfig(*rng.uniform(-3.1, 3.1, 3))
        c = quartic_at(p, forward_kinematics(p, q))
        t = math.tan(q.theta3 / 2)
        assert abs(c(t)) <= 1e-8 * c.scale * max(1.0, abs(t)) ** 4


def test_solve_quadruple():
    (cl,) = solve_quartic_real(QuarticCoeffs(1, -1, 1, -1, 1))
    assert cl.multiplicity == 4 and math.isclose(cl.value, 1.0, abs_tol=1e-9)


def test_solve_two_doubles():
    cls = solve_quartic_real(QuarticCoeffs(1, 0, -1 / 3, 0, 1))
    assert [(round(c.value, 9), c.multiplicity) for c in cls] == [(-1.0, 2), (1.0, 2)]


def test_solve_triple_plus_simple():
    cls = solve_quartic_real(QuarticCoeffs(1, -0.5, 0, 0.5, -1))
    assert [(round(c.value, 9), c.multiplicity) for c in cls] == [(-1.0, 1), (1.0, 3)]


def test_solve_random_simple_roots(rng):
    for _ in range(200):
        roots = np.sort(rng.uniform(-5, 5, 4))
        if np.min(np.diff(roots)) < 0.05:
            continue
        cls = solve_quartic_real(from_roots(*roots))
        assert [c.multiplicity for c in cls] == [1, 1, 1, 1]
        assert np.allclose([c.value for c in cls], roots, atol=1e-10)


def test_solve_complex_pairs_and_degree_drop():
    assert solve_quartic_real(QuarticCoeffs(1, 0, 1 / 6, 0, 1)) == []
    # t^3 - t: leading coefficient zero, root at infinity reported
    cls = solve_quartic_real(QuarticCoeffs(0, 0.25, 0, -0.25, 0))
    values = sorted(c.value for c in cls)
    assert values[-1] == math.inf and np.allclose(values[:3], [-1, 0, 1], atol=1e-12)
    assert [c for c in cls if c.value == math.inf][0].theta3 == -math.pi
    with pytest.raises(IdenticallyZeroError):
        solve_quartic_real(QuarticCoeffs(0, 0, 0, 0, 0))


def test_multiplicity_invariant_examples():
    assert multiplicity_invariants(QuarticCoeffs(1, -1, 1, -1, 1)) == (0, 0, 0)
    e = multiplicity_invariants(QuarticCoeffs(1, -0.5, 0, 0.5, -1))
    assert e.e1 == 0 and e.e2 == 0 and e.e3 == -0.25
    assert multiplicity_invariants(from_roots(-2, -1, 1, 2)).e1 != 0


def test_rotation_preserves_invariants_and_roots(rng):
    for _ in range(50):
        c = QuarticCoeffs(*rng.normal(size=5))
        phi = rng.uniform(-3, 3)
        d = QuarticCoeffs(*rotate_coeffs(*c, phi))
        e, f = multiplicity_invariants(c), multiplicity_invariants(d)
        assert np.allclose(e[:2], f[:2], rtol=1e-9, atol=1e-9)
        before = sorted(cl.theta3 for cl in solve_quartic_real(c))
        after = sorted(math.remainder(cl.theta3 + phi, 2 * math.pi) for cl in solve_quartic_real(d))
        assert len(before) == len(after)
        for a in before:
            assert min(abs(math.remainder(a - b, 2 * math.pi)) for b in after) < 1e-7


def test_count_iks_examples():
    assert count_iks(FOUR_CUSP_ARM, CrossSectionPoint(6.0, 0.0)) == 0
    probes = region_probes(FOUR_CUSP_ARM)
    assert count_iks(FOUR_CUSP_ARM, probes["inner"]) == 4
    assert count_iks(FOUR_CUSP_ARM, probes["outer"]) == 2


def test_count_iks_reachable_points(rng):
    for _ in range(200):
        q = JointConfig(*rng.uniform(-3, 3, 3))
        assert count_iks(FOUR_CUSP_ARM, cross_section(forward_kinematics(FOUR_CUSP_ARM, q))) >= 1


def test_boundary_points_have_multiple_root():
    curves = singularity_curves(FOUR_CUSP_ARM, 256)
    for curve in curves:
        for t2, t3 in zip(curve.theta2[::4], curve.theta3[::4]):
            p = forward_kinematics(FOUR_CUSP_ARM, JointConfig(0, t2, t3))
            cls = solve_quartic_real(quartic_at(FOUR_CUSP_ARM, p))
            assert max(c.multiplicity for c in cls) >= 2


def test_ik_round_trip(rng):
    for _ in range(300):
        p = DhParams(*rng.uniform(0.1, 3, 4), d3=rng.choice([0.0, rng.uniform(0, 2)]))
        q = JointConfig(*rng.uniform(-math.pi, math.pi, 3))
        sols = inverse_kinematics(p, forward_kinematics(p, q))
        assert any(
            all(abs(math.remainder(a - b, 2 * math.pi)) < 1e-8 for a, b in zip(s.as_tuple(), q.as_tuple())) for s in sols
        )
        assert len(sols) <= 4


def test_ik_unreachable_and_four_solutions():
    assert inverse_kinematics(FOUR_CUSP_ARM, CartesianPoint(10, 0, 0)) == []
    sp = region_probes(FOUR_CUSP_ARM)["inner"]
    target = sp.to_cartesian()
    sols = inverse_kinematics(FOUR_CUSP_ARM, target)
    assert len(sols) == 4
    for s in sols:
        assert np.linalg.norm(forward_kinematics(FOUR_CUSP_ARM, s).as_array() - target.as_array()) < 1e-8


def test_ik_degenerate_axis_point():
    # a2 = a3 with theta3 = pi puts the tip on the second joint axis
    p = DhParams(1, 1, 1, 0.5)
    target = forward_kinematics(p, JointConfig(0.2, 0.7, -math.pi))
    sols = inverse_kinematics(p, target)
    assert sols and any(s.degenerate for s in sols)
    for s in sols:
        assert np.linalg.norm(forward_kinematics(p, s).as_array() - target.as_array()) < 1e-8


def test_ik_respects_scale():
    q = JointConfig(0.4, -1.0, 2.0)
    big = DhParams(10, 20, 15, 10)
    sols = inverse_kinematics(big, forward_kinematics(big, q))
    assert any(np.allclose(s.as_tuple(), q.as_tuple(), atol=1e-8) for s in sols)
