import math

import numpy as np
import pytest

from orthoarm.classify import Verdict, a3_threshold, classify
from orthoarm.geometry import CartesianPoint, DhParams, jacobian_det_array
from orthoarm.ik import count_iks, quartic_at, solve_quartic_real
from orthoarm.workspace import (
    FeatureKind,
    boundary_cross_section,
    find_cusps,
    find_features,
    find_nodes,
    grid_iks_oracle,
    numerical_classify,
    quadruple_point_search,
    region_probes,
    singularity_curves,
)

FOUR_CUSP_ARM = DhParams(1, 2, 1.5, 1)
LONG_FOREARM_ARM = DhParams(1, 3, 4, 3)


def test_curves_two_families():
    curves = singularity_curves(FOUR_CUSP_ARM)
    assert sorted(c.branch_id for c in curves) == ["S1", "S2"]
    for c in curves:
        assert np.max(np.abs(jacobian_det_array(FOUR_CUSP_ARM, c.theta2, c.theta3))) < 1e-9


def test_curves_horizontal_lines():
    curves = {c.branch_id: c for c in singularity_curves(LONG_FOREARM_ARM)}
    t = math.acos(-3 / 4)
    assert np.allclose(curves["H+"].theta3, t) and np.allclose(curves["H-"].theta3, -t)
    for c in curves.values():
        assert np.max(np.abs(jacobian_det_array(LONG_FOREARM_ARM, c.theta2, c.theta3))) < 1e-9


def test_curves_reject_unsupported():
    with pytest.raises(ValueError):
        singularity_curves(DhParams(1, 2, 1.5, 0))
    with pytest.raises(ValueError):
        singularity_curves(DhParams(1, 2, 1.5, 1, 0.5))


def test_boundary_nesting():
    b = {c.branch_id: c for c in boundary_cross_section(FOUR_CUSP_ARM)}
    ws1, ws2 = b["WS1"], b["WS2"]
    assert ws1.closed and ws2.closed
    assert np.hypot(ws1.rho, ws1.z).max() < np.hypot(ws2.rho, ws2.z).max()
    assert ws1.rho.min() > ws2.rho.min() or ws1.rho.max() < ws2.rho.max()


def test_boundary_multiplicity_everywhere():
    for p in (FOUR_CUSP_ARM, DhParams(1, 1.5, 0.9, 0.5), DhParams(1, 1.5, 0.2, 0.5)):
        for c in boundary_cross_section(p, 512):
            for r, z in zip(c.rho, c.z):
                cls = solve_quartic_real(quartic_at(p, CartesianPoint(r, 0, z)))
                assert max(k.multiplicity for k in cls) >= 2


def test_horizontal_lines_map_to_two_points():
    pts = [c for c in boundary_cross_section(LONG_FOREARM_ARM) if not c.closed]
    assert len(pts) == 2
    a, b = pts
    assert abs(a.rho[0] - b.rho[0]) + abs(a.z[0] - b.z[0]) > 1e-3


def test_four_cusp_arm_features():
    feats = find_features(FOUR_CUSP_ARM)
    cusps = [f for f in feats if f.kind is FeatureKind.CUSP]
    assert len(cusps) == 4 and all(f.branch_id == "WS1" for f in cusps)
    assert not [f for f in feats if f.kind is FeatureKind.NODE]
    for f in cusps:
        assert abs(f.residuals.e1) < 1e-7 and abs(f.residuals.e2) < 1e-7 and abs(f.residuals.e3) >= 1e-7


def test_deformation_features():
    p = DhParams(1, 1.5, 0.9, 0.5)
    assert len(find_cusps(p)) == 4
    nodes = find_nodes(p)
    assert len(nodes) == 2
    for n in nodes:
        cls = solve_quartic_real(quartic_at(p, n.location.to_cartesian()))
        assert [c.multiplicity for c in cls] == [2, 2]
    assert find_nodes(DhParams(1, 1.5, 1.1, 0.5)) == []
    assert find_cusps(DhParams(1, 1.5, 0.2, 0.5)) == []


def test_cusp_counts_even_along_deformation():
    for a3 in (0.2, 0.3, 0.4, 0.5, 0.7, 0.9, 1.1):
        assert len(find_cusps(DhParams(1, 1.5, a3, 0.5), branches=("WS1",))) % 2 == 0


def test_deformation_monotone_transition():
    a3s = (0.2, 0.3, 0.4, 0.5, 0.7, 0.9, 1.1)
    v = [numerical_classify(DhParams(1, 1.5, a3, 0.5)) for a3 in a3s]
    changes = [i for i in range(len(v) - 1) if v[i] is not v[i + 1]]
    assert len(changes) == 1 and v[0] is Verdict.BINARY
    i = changes[0]
    assert a3s[i] <= a3_threshold(1, 1.5, 0.5).threshold_low <= a3s[i + 1]


def test_numerical_classify_examples():
    assert numerical_classify(DhParams(1, 0.5, 0.15, 0.21)) is Verdict.BINARY
    assert numerical_classify(DhParams(1, 0.5, 0.4, 0.1)) is Verdict.BINARY
    assert numerical_classify(DhParams(1, 0.5, 0.45, 0.4)) is Verdict.QUATERNARY
    assert numerical_classify(FOUR_CUSP_ARM) is Verdict.QUATERNARY


def test_grid_oracle_examples():
    assert grid_iks_oracle(FOUR_CUSP_ARM) == 4
    assert grid_iks_oracle(DhParams(1, 0.5, 0.15, 0.21)) == 2
    assert grid_iks_oracle(FOUR_CUSP_ARM, 200, sampling="workspace") == 4
    with pytest.raises(ValueError):
        grid_iks_oracle(FOUR_CUSP_ARM, sampling="polar")


def test_oracles_agree_off_surface(rng):
    for _ in range(60):
        a2, d2 = rng.uniform(0.1, 3, 2)
        a3 = rng.uniform(0.02, 3)
        if abs(a3 - a3_threshold(1, a2, d2).threshold_low) < 0.01:
            continue
        p = DhParams(1, a2, a3, d2)
        expected = classify(p).verdict
        assert numerical_classify(p) is expected
        assert (grid_iks_oracle(p) == 4) == (expected is Verdict.QUATERNARY)


def test_quadruple_point_on_and_off_surface():
    t = a3_threshold(1, 1.5, 0.5).threshold_low
    on = quadruple_point_search(DhParams(1, 1.5, t, 0.5))
    assert on.below(1e-6)
    assert count_iks(DhParams(1, 1.5, t, 0.5), on.location) <= 2
    deep = quadruple_point_search(FOUR_CUSP_ARM)
    assert max(abs(e) for e in deep.residuals) > 1e-3 * deep.scale
    binary = quadruple_point_search(DhParams(1, 1.5, 0.2, 0.5))
    assert not binary.below(1e-6)


def test_region_probes_four_cusp_arm():
    probes = region_probes(FOUR_CUSP_ARM)
    assert count_iks(FOUR_CUSP_ARM, probes["inner"]) == 4
    assert count_iks(FOUR_CUSP_ARM, probes["outer"]) == 2


def test_interior_points_have_simple_roots(rng):
    probes = region_probes(FOUR_CUSP_ARM)
    for sp in probes.values():
        cls = solve_quartic_real(quartic_at(FOUR_CUSP_ARM, sp.to_cartesian()))
        assert all(c.multiplicity == 1 for c in cls)


def test_scaled_inputs_report_scaled_boundary():
    small = {c.branch_id: c for c in boundary_cross_section(FOUR_CUSP_ARM, 128)}
    big = {c.branch_id: c for c in boundary_cross_section(FOUR_CUSP_ARM.scaled(3), 128)}
    assert np.allclose(big["WS1"].rho, 3 * small["WS1"].rho)
    assert len(find_cusps(FOUR_CUSP_ARM.scaled(3))) == len(find_cusps(FOUR_CUSP_ARM))
