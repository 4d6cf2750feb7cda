"""Serialization and SVG rendering of singularity curves and boundaries."""

from __future__ import annotations

import csv
import io

import numpy as np

from .atlas import _deterministic_svg, _fmt
from .geometry import DhParams
from .workspace import BoundaryCurve, BoundaryFeature, FeatureKind, JointCurve

_MARKERS = {FeatureKind.CUSP: ("^", "tab:red"), FeatureKind.NODE: ("o", "tab:green"), FeatureKind.QUADRUPLE: ("*", "k")}


def boundary_csv(curves: list[BoundaryCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["branch", "theta2", "theta3", "rho", "z"])
    for c in curves:
        for row in zip(c.theta2, c.theta3, c.rho, c.z):
            w.writerow([c.branch_id, *(_fmt(float(v)) for v in row)])
    return buf.getvalue()


def workspace_json(curves: list[BoundaryCurve], features: list[BoundaryFeature]) -> dict:
    return {
        "curves": [
            {"branch": c.branch_id, "closed": c.closed, "rho": c.rho.tolist(), "z": c.z.tolist()} for c in curves
        ],
        "features": [
            {
                "kind": f.kind.value,
                "branch": f.branch_id,
                "rho": f.location.rho,
                "z": f.location.z,
                "residuals": list(f.residuals),
            }
            for f in features
        ],
    }


def _split_wraps(x: np.ndarray, y: np.ndarray, jump: float = np.pi):
    """Break a sampled angle curve where it wraps around the torus."""
    cuts = np.nonzero(np.abs(np.diff(y)) > jump)[0] + 1
    return zip(np.split(x, cuts), np.split(y, cuts))


def workspace_svg(
    params: DhParams, joint: list[JointCurve], curves: list[BoundaryCurve], features: list[BoundaryFeature]
) -> str:
    """Joint-space singularity curves (left) and the cross-section boundary (right)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 5))
    colors = {"S1": "tab:blue", "S2": "tab:orange", "H+": "tab:purple", "H-": "tab:purple"}
    for jc in joint:
        first = True
        for xs, ys in _split_wraps(jc.theta2, jc.theta3):
            ax1.plot(xs, ys, color=colors[jc.branch_id], lw=1, label=jc.branch_id if first else None)
            first = False
    ax1.set_xlim(-np.pi, np.pi)
    ax1.set_ylim(-np.pi, np.pi)
    ax1.set_xlabel("theta2")
    ax1.set_ylabel("theta3")
    ax1.legend(loc="upper right", fontsize=7)

    for c in curves:
        if c.closed:
            ax2.plot(np.append(c.rho, c.rho[0]), np.append(c.z, c.z[0]), lw=1, label=c.branch_id)
        else:
            ax2.plot(c.rho, c.z, "D", color="tab:purple", ms=4, label=f"{c.branch_id} image")
    for kind, (marker, color) in _MARKERS.items():
        pts = [f.location for f in features if f.kind is kind]
        if pts:
            ax2.plot([p.rho for p in pts], [p.z for p in pts], marker, color=color, ms=7, ls="none", label=kind.value)
    ax2.set_aspect("equal")
    ax2.set_xlabel("rho")
    ax2.set_ylabel("z")
    ax2.legend(loc="upper right", fontsize=7)
    a1, a2, a3, d2, d3 = params.as_tuple()
    fig.suptitle(f"a1={a1:g} a2={a2:g} a3={a3:g} d2={d2:g}")
    text = _deterministic_svg(fig)
    plt.close(fig)
    return text
