import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthoarm.classify import (
    Q1_TERMS,
    Q2_TERMS,
    ClassificationResult,
    D3Caveat,
    Rule,
    Verdict,
    a3_threshold,
    classify,
    q1,
    q2,
    q2_diagnostics,
    q3,
    reference_surfaces,
)
from orthoarm.geometry import DhParams

pos = st.floats(0.05, 3.0)


def test_reference_trio():
    assert classify(DhParams(1, 0.5, 0.15, 0.21)).verdict is Verdict.BINARY
    assert classify(DhParams(1, 0.5, 0.4, 0.1)).verdict is Verdict.BINARY
    assert classify(DhParams(1, 0.5, 0.45, 0.4)).verdict is Verdict.QUATERNARY


def test_special_rules():
    r = classify(DhParams(1, 2, 1.5, 1))
    assert r.verdict is Verdict.QUATERNARY and r.rule is Rule.THRESHOLD_COMPARE
    assert classify(DhParams(1, 3, 4, 3)).verdict is Verdict.QUATERNARY
    r = classify(DhParams(0, 1, 0.1, 0.1))
    assert r.verdict is Verdict.QUATERNARY and r.rule is Rule.ZERO_LENGTH and r.threshold is None
    r = classify(DhParams(3, 2, 1, 0, 0))
    assert r.verdict is Verdict.BINARY and r.rule is Rule.NO_OFFSETS
    assert classify(DhParams(1, 1, 0.5, 0)).verdict is Verdict.BINARY  # a1 == a2
    assert classify(DhParams(1, 2, 1, 0)).verdict is Verdict.QUATERNARY
    with pytest.raises(ValueError):
        classify(DhParams(0, 0, 0, 0, 0))


def test_threshold_values_frozen():
    t = a3_threshold(1, 1.5, 0.5)
    assert 0.2 <= t.threshold_low <= 0.5
    assert t.threshold_low == pytest.approx(0.26694958891406473, rel=1e-12)
    assert a3_threshold(1, 0.5, 0.4).threshold_low < 0.45
    assert t.A >= t.B > 0
    with pytest.raises(ValueError):
        a3_threshold(1, 0, 0.5)


@settings(max_examples=200, deadline=None)
@given(pos, pos, st.floats(0.1, 10))
def test_threshold_scale_covariance(a2, d2, k):
    t = a3_threshold(1, a2, d2).threshold_low
    assert a3_threshold(k, k * a2, k * d2).threshold_low == pytest.approx(k * t, rel=1e-9, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(pos, pos)
def test_thresholds_are_roots_of_q1(a2, d2):
    t = a3_threshold(1, a2, d2)
    mag = sum(abs(c) * a2**i * t.threshold_low**j * d2**k for c, i, j, k in Q1_TERMS)
    assert abs(q1(a2, t.threshold_low, d2)) <= 1e-10 * max(1.0, mag)
    if t.threshold_high is not None:
        hi = t.threshold_high
        mag = sum(abs(c) * a2**i * hi**j * d2**k for c, i, j, k in Q1_TERMS)
        assert abs(q1(a2, hi, d2)) <= 1e-10 * max(1.0, mag)


@settings(max_examples=200, deadline=None)
@given(pos, pos, pos, st.floats(0.1, 10))
def test_verdict_scale_invariant(a2, a3, d2, k):
    p = DhParams(1, a2, a3, d2)
    assert classify(p).verdict is classify(p.scaled(k)).verdict


@settings(max_examples=300, deadline=None)
@given(pos, pos, pos)
def test_q1_sign_agrees_with_threshold(a2, a3, d2):
    t = a3_threshold(1, a2, d2)
    if abs(a3 - t.threshold_low) < 1e-6:
        return
    if t.threshold_high is not None and abs(a3 - t.threshold_high) < 1e-6:
        return
    # q1 is a quadratic in a3**2 with negative leading coefficient between the branches
    between = t.threshold_low < a3 < (t.threshold_high if t.threshold_high is not None else math.inf)
    assert (q1(a2, a3, d2) > 0) == between


def test_threshold_low_never_above_a2():
    for a2 in np.arange(0.1, 3.0001, 0.05):
        for d2 in np.arange(0.05, 3.0001, 0.05):
            assert a3_threshold(1, a2, d2).threshold_low <= a2 + 1e-9


def test_a2_le_a3_always_quaternary(rng):
    for _ in range(500):
        a2, d2 = rng.uniform(0.05, 3, 2)
        a3 = a2 + rng.uniform(0, 2)
        assert classify(DhParams(1, a2, a3, d2)).verdict is Verdict.QUATERNARY


def test_on_surface_marker():
    t = a3_threshold(1, 1.5, 0.5).threshold_low
    r = classify(DhParams(1, 1.5, t, 0.5))
    assert r.on_surface and r.verdict is Verdict.QUATERNARY
    assert not classify(DhParams(1, 1.5, t + 1e-6, 0.5)).on_surface


def test_d3_caveats():
    assert classify(DhParams(1, 0.5, 0.15, 0.21)).d3_caveat is D3Caveat.EXACT
    assert classify(DhParams(1, 2, 0.02, 0.1, 5)).d3_caveat is D3Caveat.SUFFICIENT_ONLY
    assert classify(DhParams(1, 2, 0.02, 0.1, 0.15)).d3_caveat is D3Caveat.CONDITIONALLY_EXACT
    assert classify(DhParams(1, 2, 0.02, 0.5, 5)).d3_caveat is D3Caveat.CONDITIONALLY_EXACT
    assert classify(DhParams(1, 2, 1.5, 0.1, 5)).d3_caveat is D3Caveat.EXACT


def test_d2_zero_with_d3_uses_limit_threshold():
    r = classify(DhParams(1, 0.5, 0.3, 0, 0.5))
    assert r.rule is Rule.THRESHOLD_COMPARE and r.threshold == 0.5 and r.verdict is Verdict.BINARY
    assert classify(DhParams(1, 2, 0.01, 0, 0.5)).verdict is Verdict.QUATERNARY


def test_result_round_trip():
    r = classify(DhParams(1, 2, 1.5, 1))
    assert ClassificationResult.from_dict(r.to_dict()) == r


def test_q3_examples():
    assert q3(2, 1, 1) == 0
    assert q3(1, 1, 1) == 1
    assert q3(3.0, 1.5, 1.0) == 0


def test_reference_surface_identities(rng):
    for a2, a3, d2 in rng.uniform(0.1, 3, (100, 3)):
        r = reference_surfaces(a2, a3, d2)
        assert r.ref10 - r.ref11 == pytest.approx(-4 * a2**3, rel=1e-12, abs=1e-9)
    a2, d2 = 1.2, 0.7
    assert reference_surfaces(a2, math.sqrt(a2**2 + d2**2), d2).ref8 == pytest.approx(0, abs=1e-12)


def test_q1_structure():
    assert len(Q1_TERMS) == 15
    # q1 is even in d2 and in a3
    assert q1(1.3, 0.7, 0.4) == q1(1.3, -0.7, -0.4)


def test_q2_regression_constants():
    assert q2(1, 1, 0) == 0
    assert q2(1, 1, 1) == -20
    d = q2_diagnostics()
    assert d["monomials"] == len(Q2_TERMS) == 74
    assert d["duplicate_monomials"] == 0 and d["even_in_d2"] and not d["homogeneous"]


def test_negative_radicand_is_reported_not_clamped():
    t = a3_threshold(1, 1.0, 1e-9)
    assert t.radicand_low >= -1e-12
    from orthoarm.classify import ThresholdComputation

    tc = ThresholdComputation(1.0, 1.0, -1e-3, 1.0)
    assert tc.threshold_low is None and tc.threshold_high == 0.5
