"""Acceptance criteria at full size; each test prints one PASS/FAIL line."""

import pytest

from orthoarm import verify


def _run(capsys, check, **kw):
    result = check(**kw)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail


def test_1_reference_trio(capsys):
    _run(capsys, verify.check_reference_trio)


def test_2_four_cusp_arm(capsys):
    _run(capsys, verify.check_four_cusp_arm)


def test_3_deformation_sequence(capsys):
    _run(capsys, verify.check_deformation_sequence)


def test_4_q1_identity(capsys):
    _run(capsys, verify.check_q1_identity)


@pytest.mark.slow
def test_5_section_scans(capsys):
    _run(capsys, verify.check_grid_agreement)


def test_6_quadruple_points(capsys):
    _run(capsys, verify.check_quadruple)


def test_7_round_trip(capsys):
    _run(capsys, verify.check_round_trip)


def test_8_d3_independence(capsys):
    _run(capsys, verify.check_d3_shift)


def test_9_threshold_geometry(capsys):
    _run(capsys, verify.check_threshold_geometry)
