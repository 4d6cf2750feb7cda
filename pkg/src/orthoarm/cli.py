"""Command-line interface: ``orthoarm <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error.  File outputs
go to ``--out`` or, when omitted, into ``$ORTHOARM_OUTPUT_DIR`` (default: the
current directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import atlas, verify
from .classify import classify
from .geometry import CartesianPoint, DhParams, JointConfig, forward_kinematics
from .ik import inverse_kinematics

OUTPUT_ENV = "ORTHOARM_OUTPUT_DIR"


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"must be finite and nonnegative: {text!r}")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _assignment(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or name not in atlas.PARAM_NAMES:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE with NAME in {atlas.PARAM_NAMES}")
    return name, _nonneg(value)


def _sweep(text: str) -> atlas.SweepRange:
    name, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or name not in atlas.PARAM_NAMES or len(parts) != 3:
        raise argparse.ArgumentTypeError("expected NAME=START:STOP:STEP")
    start, stop, step = (_nonneg(p) for p in parts)
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("need STEP > 0 and STOP >= START")
    return atlas.SweepRange(name, start, stop, step)


def _add_params(p: argparse.ArgumentParser) -> None:
    for name in ("a1", "a2", "a3", "d2"):
        p.add_argument(f"--{name}", type=_nonneg, required=True)
    p.add_argument("--d3", type=_nonneg, default=0.0)


def _params(ns) -> DhParams:
    return DhParams(ns.a1, ns.a2, ns.a3, ns.d2, ns.d3)


def _out_path(ns, default_name: str) -> Path:
    if ns.out:
        return Path(ns.out)
    return Path(os.environ.get(OUTPUT_ENV, ".")) / default_name


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_classify(ns) -> int:
    try:
        result = classify(_params(ns))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result.to_dict())
    return 0


def cmd_fk(ns) -> int:
    p = forward_kinematics(_params(ns), JointConfig(ns.theta1, ns.theta2, ns.theta3))
    _emit({"x": p.x, "y": p.y, "z": p.z})
    return 0


def cmd_ik(ns) -> int:
    params = _params(ns)
    if params.a1 <= 0:
        print("error: ik needs a1 > 0", file=sys.stderr)
        return 2
    target = CartesianPoint(ns.x, ns.y, ns.z)
    sols = []
    for q in inverse_kinematics(params, target, ns.tol):
        r = forward_kinematics(params, q)
        resid = math.dist((r.x, r.y, r.z), (target.x, target.y, target.z))
        sols.append(
            {"theta1": q.theta1, "theta2": q.theta2, "theta3": q.theta3, "degenerate": q.degenerate, "residual": resid}
        )
    _emit(sols)
    return 0


def cmd_workspace(ns) -> int:
    from . import plots, workspace

    params = _params(ns)
    try:
        curves = workspace.boundary_cross_section(params, ns.samples)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    features = workspace.find_features(params, ns.samples)
    path = _out_path(ns, f"workspace.{ns.format}")
    path.parent.mkdir(parents=True, exist_ok=True)
    if ns.format == "svg":
        path.write_text(plots.workspace_svg(params, workspace.singularity_curves(params, ns.samples), curves, features))
    elif ns.format == "csv":
        path.write_text(plots.boundary_csv(curves))
    else:
        path.write_text(json.dumps(plots.workspace_json(curves, features), indent=2, sort_keys=True))
    summary = {
        "output": str(path),
        "cusps": sum(f.kind.value == "cusp" for f in features),
        "nodes": sum(f.kind.value == "node" for f in features),
        "quadruple_points": sum(f.kind.value == "quadruple_point" for f in features),
    }
    _emit(summary)
    return 0


def cmd_scan(ns) -> int:
    fixed = dict(ns.fix or [])
    try:
        spec = atlas.ScanSpec(
            fixed,
            tuple(ns.sweep),
            tuple(ns.oracle) if ns.oracle else atlas.ALL_ORACLES,
            epsilon=ns.epsilon,
            threshold_offset=ns.threshold_offset,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cells = atlas.scan_section(spec, workers=ns.workers)
    stem = _out_path(ns, "scan")
    paths = atlas.write_outputs(spec, cells, stem.with_suffix(""), ns.format)
    report = atlas.agreement_report(cells)
    _emit({"outputs": [str(p) for p in paths], **report["counts"]})
    return 0


def cmd_surface(ns) -> int:
    mesh = atlas.surface_mesh(ns.a2_range, ns.d2_range)
    path = _out_path(ns, "surface.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(mesh.to_csv())
    _emit({"output": str(path), "nodes": int(mesh.threshold.size), "gaps": int((mesh.threshold != mesh.threshold).sum())})
    return 0


def cmd_verify(ns) -> int:
    results = verify.run_all(quick=not ns.full, threshold_offset=ns.threshold_offset, workers=ns.workers, echo=print)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    for r in failed:
        for item in r.failures[:10]:
            print(f"  {r.number}: {item}")
    return 1 if failed else 0


def _range(name: str):
    def parse(text: str) -> atlas.SweepRange:
        return _sweep(f"{name}={text}")

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthoarm", description="Binary/quaternary analysis of orthogonal 3R arms")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="closed-form verdict")
    _add_params(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fk", help="forward kinematics")
    _add_params(p)
    for name in ("theta1", "theta2", "theta3"):
        p.add_argument(f"--{name}", type=_finite, required=True)
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("ik", help="inverse kinematics")
    _add_params(p)
    for name in ("x", "y", "z"):
        p.add_argument(f"--{name}", type=_finite, required=True)
    p.add_argument("--tol", type=_nonneg, default=1e-8)
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("workspace", help="singularity curves, boundaries and features")
    _add_params(p)
    p.add_argument("--samples", type=_positive_int, default=2048)
    p.add_argument("--format", choices=("svg", "csv", "json"), default="svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_workspace)

    p = sub.add_parser("scan", help="section scan comparing oracles")
    p.add_argument("--fix", type=_assignment, action="append", metavar="NAME=VALUE")
    p.add_argument("--sweep", type=_sweep, action="append", required=True, metavar="NAME=START:STOP:STEP")
    p.add_argument("--oracle", choices=[o.value for o in atlas.Oracle], action="append")
    p.add_argument("--epsilon", type=_nonneg, default=atlas.DEFAULT_EPSILON)
    p.add_argument("--threshold-offset", type=_finite, default=0.0, help="fault injection: shift the closed-form threshold")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--format", choices=("csv", "json", "svg"), action="append")
    p.add_argument("--out", help="output stem; extensions are added per format")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("surface", help="separating-surface mesh")
    p.add_argument("--a2-range", type=_range("a2"), default=atlas.SweepRange("a2", 0.03, 3.0, 0.03), metavar="START:STOP:STEP")
    p.add_argument("--d2-range", type=_range("d2"), default=atlas.SweepRange("d2", 0.03, 3.0, 0.03), metavar="START:STOP:STEP")
    p.add_argument("--out")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("verify", help="run the acceptance checks")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", default=True)
    mode.add_argument("--full", action="store_true")
    p.add_argument("--threshold-offset", type=_finite, default=0.0, help="fault injection: shift the closed-form threshold")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(ns, "format", None) is None and ns.command == "scan":
        ns.format = ["csv", "json", "svg"]
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
