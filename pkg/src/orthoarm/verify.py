"""Acceptance checks shared by ``orthoarm verify`` and the test suite.

Each check returns a :class:`CheckResult`; ``quick`` shrinks sample counts
and grid densities so the whole run fits in a few seconds.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .atlas import STANDARD_SECTIONS, SweepRange, agreement_report, scan_section, section
from .classify import (
    Q1_TERMS,
    Verdict,
    a3_threshold,
    classify,
    q1,
    reference_surfaces,
)
from .geometry import DhParams, JointConfig, forward_kinematics, normalize
from .ik import (
    coeffs_from_invariants,
    count_iks,
    inverse_kinematics,
    invariants_array,
    point_invariants,
    quartic_at,
)
from .workspace import find_cusps, find_nodes, grid_iks_oracle, numerical_classify, quadruple_point_search, region_probes

REFERENCE_TRIO = (
    (DhParams(1, 0.5, 0.15, 0.21), Verdict.BINARY),
    (DhParams(1, 0.5, 0.4, 0.1), Verdict.BINARY),
    (DhParams(1, 0.5, 0.45, 0.4), Verdict.QUATERNARY),
)
FOUR_CUSP_ARM = DhParams(1, 2, 1.5, 1)
DEFORMATION_A3 = (0.2, 0.3, 0.4, 0.5, 0.7, 0.9, 1.1)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _grid_verdict(p: DhParams) -> Verdict:
    return Verdict.QUATERNARY if grid_iks_oracle(p) == 4 else Verdict.BINARY


def check_reference_trio(quick: bool = False, threshold_offset: float = 0.0) -> CheckResult:
    t0 = time.perf_counter()
    bad = []
    for p, expected in REFERENCE_TRIO:
        got = {
            "closed_form": classify(p).verdict,
            "cusp_scan": numerical_classify(p),
            "grid_iks": _grid_verdict(p),
        }
        if threshold_offset:
            thr = classify(p).threshold
            got["closed_form"] = Verdict.QUATERNARY if p.a3 > thr + threshold_offset else Verdict.BINARY
        for k, v in got.items():
            if v is not expected:
                bad.append(f"{p.as_tuple()[:4]} {k}={v.value}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10.0
    detail = "3 manipulators x 3 oracles match" if not bad else "; ".join(bad)
    return CheckResult(1, "Reference trio verdicts", ok, detail + f", {dt:.2f} s < 10 s", dt, bad)


def check_four_cusp_arm(quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    cusps = [f for f in find_cusps(FOUR_CUSP_ARM) if f.branch_id == "WS1"]
    nodes = find_nodes(FOUR_CUSP_ARM)
    probes = region_probes(FOUR_CUSP_ARM)
    inner = count_iks(FOUR_CUSP_ARM, probes["inner"]) if "inner" in probes else None
    outer = count_iks(FOUR_CUSP_ARM, probes["outer"]) if "outer" in probes else None
    ok = len(cusps) == 4 and len(nodes) == 0 and inner == 4 and outer == 2
    detail = f"cusps={len(cusps)} nodes={len(nodes)} inner IKS={inner} outer IKS={outer}"
    return CheckResult(2, "Four-cusp arm features", ok, detail, time.perf_counter() - t0)


def check_deformation_sequence(quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    verdicts, nodes = [], {}
    for a3 in DEFORMATION_A3:
        p = DhParams(1, 1.5, a3, 0.5)
        v = classify(p).verdict
        if numerical_classify(p) is not v:
            verdicts.append(None)
        else:
            verdicts.append(v)
        if a3 in (0.9, 1.1):
            nodes[a3] = len(find_nodes(p))
    changes = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a is not b)
    thr = a3_threshold(1, 1.5, 0.5).threshold_low
    ok = (
        None not in verdicts
        and changes == 1
        and verdicts[0] is Verdict.BINARY
        and verdicts[-1] is Verdict.QUATERNARY
        and verdicts[DEFORMATION_A3.index(0.9)] is Verdict.QUATERNARY
        and nodes == {0.9: 2, 1.1: 0}
        and 0.2 <= thr <= 0.5
    )
    seq = "".join("?" if v is None else v.value[0].upper() for v in verdicts)
    detail = f"verdicts {seq} ({changes} change), nodes a3=1.1:{nodes.get(1.1)} a3=0.9:{nodes.get(0.9)}, threshold={thr:.6f}"
    return CheckResult(3, "a3 deformation sequence", ok, detail, time.perf_counter() - t0)


def check_q1_identity(quick: bool = False, n: int = 1000, seed: int = 0) -> CheckResult:
    """Q1 against the reference domain-wall polynomial, relative to the monomial magnitude."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    pts = 3.0 * (1.0 - rng.random((n, 3)))
    worst = 0.0
    fails = 0
    for a2, a3, d2 in pts:
        mag = sum(abs(c) * a2**i * a3**j * d2**k for c, i, j, k in Q1_TERMS)
        rel = abs(q1(a2, a3, d2) - reference_surfaces(a2, a3, d2).ref9) / mag
        worst = max(worst, rel)
        fails += rel >= 1e-12
    ok = fails == 0
    detail = f"{fails}/{n} points exceed 1e-12, worst relative difference {worst:.3e}"
    return CheckResult(4, "Q1 identical to domain-wall polynomial", ok, detail, time.perf_counter() - t0)


def check_grid_agreement(quick: bool = False, threshold_offset: float = 0.0, workers: int = 1) -> CheckResult:
    t0 = time.perf_counter()
    step = 0.15 if quick else 0.03
    total, bad = 0, []
    for name, value in STANDARD_SECTIONS:
        spec = section(name, value, threshold_offset=threshold_offset)
        spec = type(spec)(
            spec.fixed,
            tuple(SweepRange(s.name, step, 3.0, step) for s in spec.swept),
            threshold_offset=threshold_offset,
        )
        cells = scan_section(spec, workers=workers)
        rep = agreement_report(cells)
        total += rep["counts"]["total"]
        for d in rep["disagreements"]:
            bad.append((f"{name}={value}", d))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 900.0
    detail = f"{len(bad)} disagreements in {total} cells, step {step}, {dt:.1f} s < 900 s"
    if bad:
        first = bad[0][1]["params"]
        detail += f"; first at {bad[0][0]} a2={first['a2']:.4g} a3={first['a3']:.4g} d2={first['d2']:.4g}"
    return CheckResult(5, "Section scans: closed form vs cusp scan vs grid", ok, detail, dt, bad)


def _quad_ok(p: DhParams, tol: float = 1e-6) -> bool:
    q = quadruple_point_search(p)
    return q is not None and q.below(tol)


def check_quadruple(quick: bool = False, n: int = 20, seed: int = 1) -> CheckResult:
    t0 = time.perf_counter()
    n = 5 if quick else n
    rng = np.random.default_rng(seed)
    on_bad = off_bad = 0
    for _ in range(n):
        a2, d2 = rng.uniform(0.1, 3.0, 2)
        thr = a3_threshold(1.0, a2, d2).threshold_low
        on_bad += not _quad_ok(DhParams(1.0, a2, thr, d2))
        off = thr - 0.05 if (rng.random() < 0.5 and thr - 0.05 >= 0.05) else thr + 0.05
        off_bad += _quad_ok(DhParams(1.0, a2, off, d2))
    ok = on_bad == 0 and off_bad == 0
    detail = f"on-surface misses {on_bad}/{n}, off-surface false hits {off_bad}/{n}"
    return CheckResult(6, "Quadruple points on the separating surface", ok, detail, time.perf_counter() - t0)


def random_params(rng: np.random.Generator, with_d3: bool = True) -> DhParams:
    a1, a2, a3 = rng.uniform(0.1, 3.0, 3)
    d2 = rng.uniform(0.0, 3.0)
    d3 = rng.uniform(0.0, 2.0) if with_d3 and rng.random() < 0.5 else 0.0
    return DhParams(a1, a2, a3, d2, d3)


def random_config(rng: np.random.Generator) -> JointConfig:
    return JointConfig(*rng.uniform(-math.pi, math.pi, 3))


def _quartic_residual(c, t: float) -> float:
    scale = max(1.0, max(abs(v) for v in c))
    m = max(1.0, abs(t))
    return abs(c(t)) / (scale * m**4)


def check_round_trip(quick: bool = False, n: int = 1000, seed: int = 2) -> CheckResult:
    t0 = time.perf_counter()
    n = 100 if quick else n
    rng = np.random.default_rng(seed)
    misses, root_bad = [], 0
    for _ in range(n):
        p, q = random_params(rng), random_config(rng)
        target = forward_kinematics(p, q)
        sols = inverse_kinematics(p, target)
        hit = any(
            all(abs(math.remainder(a - b, 2 * math.pi)) < 1e-8 for a, b in zip(s.as_tuple(), q.as_tuple()))
            for s in sols
        )
        if not hit:
            misses.append((p.as_tuple(), q.as_tuple()))
        c = quartic_at(p, target)
        for s in sols:
            if abs(s.theta3) < math.pi - 1e-6 and _quartic_residual(c, math.tan(s.theta3 / 2)) > 1e-8:
                root_bad += 1
    ok = not misses and root_bad == 0
    detail = f"{len(misses)}/{n} configs not recovered, {root_bad} non-root solutions"
    return CheckResult(7, "FK/IK round trip", ok, detail, time.perf_counter() - t0, misses)


def check_d3_shift(quick: bool = False, n: int = 200, seed: int = 3) -> CheckResult:
    """Coefficients see d3 only through V -> V + d3**2, and stay exact IK quartics."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    shift_bad = root_bad = 0
    for _ in range(n):
        base = normalize(random_params(rng, with_d3=False))
        q = random_config(rng)
        for d3 in (0.0, 0.5, 2.0):
            p = base.with_(d3=d3)
            pt = forward_kinematics(p, q)
            V, R = point_invariants(p, pt)
            V0, _ = point_invariants(base, pt)
            direct = invariants_array(*coeffs_from_invariants(p.a2, p.a3, p.d2, V, R))
            shifted = invariants_array(*coeffs_from_invariants(p.a2, p.a3, p.d2, V0 + d3 * d3, R))
            c = quartic_at(p, pt)
            scale = max(1.0, max(abs(v) for v in c))
            if any(abs(a - b) > 1e-12 * scale**3 for a, b in zip(direct, shifted)):
                shift_bad += 1
            if abs(q.theta3) < math.pi - 1e-6 and _quartic_residual(c, math.tan(q.theta3 / 2)) > 1e-8:
                root_bad += 1
    ok = shift_bad == 0 and root_bad == 0
    detail = f"{shift_bad} V-shift mismatches, {root_bad} FK configs off the quartic, {n} x 3 cases"
    return CheckResult(8, "Independence of the multiplicity conditions from d3", ok, detail, time.perf_counter() - t0)


def check_threshold_geometry(quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    low_bad = []
    for a2 in np.round(np.arange(0.1, 3.0 + 1e-9, 0.05), 10):
        for d2 in np.round(np.arange(0.05, 3.0 + 1e-9, 0.05), 10):
            t = a3_threshold(1.0, a2, d2).threshold_low
            if t is None or t > a2 + 1e-9:
                low_bad.append((a2, d2, t))
    high_bad, defined = [], 0
    for d2 in (0.5, 1.0):
        for a2 in SweepRange("a2").values():
            t = a3_threshold(1.0, float(a2), d2).threshold_high
            if t is None:
                continue
            defined += 1
            if not t > a2:
                high_bad.append((a2, d2, t))
    ok = not low_bad and not high_bad
    detail = f"low branch above a2 at {len(low_bad)} nodes; upper branch <= a2 at {len(high_bad)}/{defined} nodes"
    return CheckResult(9, "Threshold geometry", ok, detail, time.perf_counter() - t0, low_bad + high_bad)


CHECKS: tuple[Callable[..., CheckResult], ...] = (
    check_reference_trio,
    check_four_cusp_arm,
    check_deformation_sequence,
    check_q1_identity,
    check_grid_agreement,
    check_quadruple,
    check_round_trip,
    check_d3_shift,
    check_threshold_geometry,
)


def run_all(quick: bool = False, threshold_offset: float = 0.0, workers: int = 1, echo=None) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        kwargs = {"quick": quick}
        if check in (check_reference_trio, check_grid_agreement):
            kwargs["threshold_offset"] = threshold_offset
        if check is check_grid_agreement:
            kwargs["workers"] = workers
        r = check(**kwargs)
        if echo:
            echo(r.line())
        results.append(r)
    return results
