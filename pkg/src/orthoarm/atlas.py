"""Parameter-space scans comparing the closed-form verdict with numerical oracles."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .classify import Verdict, a3_threshold, classify
from .geometry import DhParams
from .workspace import grid_iks_oracle, numerical_classify

PARAM_NAMES = ("a1", "a2", "a3", "d2", "d3")
DEFAULT_STEP = 0.03
DEFAULT_EPSILON = 0.01


class Oracle(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    CUSP_SCAN = "cusp_scan"
    GRID_IKS = "grid_iks"


ALL_ORACLES = (Oracle.CLOSED_FORM, Oracle.CUSP_SCAN, Oracle.GRID_IKS)


@dataclass(frozen=True)
class SweepRange:
    name: str
    start: float = DEFAULT_STEP
    stop: float = 3.0
    step: float = DEFAULT_STEP

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # rounding keeps 0.03 * 7 from printing as 0.21000000000000002
        return np.round(self.start + self.step * np.arange(n), 12)


@dataclass(frozen=True)
class ScanSpec:
    """Two swept parameters over a grid, the rest held fixed.

    ``a1`` defaults to 1 and ``d3`` to 0 when not given.  ``threshold_offset``
    shifts the closed-form threshold and exists only to inject faults.
    """

    fixed: dict
    swept: tuple[SweepRange, SweepRange]
    oracles: tuple[Oracle, ...] = ALL_ORACLES
    epsilon: float = DEFAULT_EPSILON
    grid_res: int = 1024
    threshold_offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "fixed", {"a1": 1.0, "d3": 0.0, **dict(self.fixed)})
        object.__setattr__(self, "oracles", tuple(Oracle(o) for o in self.oracles))
        self.validate()

    def validate(self) -> None:
        if len(self.swept) != 2:
            raise ValueError("exactly two swept parameters are required")
        names = [s.name for s in self.swept]
        if len(set(names)) != 2:
            raise ValueError("swept parameters must differ")
        for s in self.swept:
            if s.name not in PARAM_NAMES:
                raise ValueError(f"unknown parameter {s.name!r}")
            if not s.step > 0:
                raise ValueError(f"step must be positive for {s.name}")
            if s.stop < s.start or s.start < 0:
                raise ValueError(f"empty or negative range for {s.name}")
        for k, v in self.fixed.items():
            if k not in PARAM_NAMES:
                raise ValueError(f"unknown parameter {k!r}")
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{k} must be finite and nonnegative")
        missing = set(PARAM_NAMES) - set(self.fixed) - set(names)
        if missing:
            raise ValueError(f"parameters neither fixed nor swept: {sorted(missing)}")
        overlap = set(self.fixed) & set(names) - {"a1", "d3"}
        if overlap:
            raise ValueError(f"parameters both fixed and swept: {sorted(overlap)}")
        if not self.oracles:
            raise ValueError("at least one oracle is required")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")

    def grid(self) -> list[DhParams]:
        out = []
        s0, s1 = self.swept
        for u in s0.values():
            for v in s1.values():
                vals = {**self.fixed, s0.name: float(u), s1.name: float(v)}
                out.append(DhParams(*(vals[n] for n in PARAM_NAMES)))
        return out

    def to_dict(self) -> dict:
        return {
            "fixed": {k: self.fixed[k] for k in PARAM_NAMES if k in self.fixed and k not in self.swept_names},
            "swept": [{"name": s.name, "start": s.start, "stop": s.stop, "step": s.step} for s in self.swept],
            "oracles": [o.value for o in self.oracles],
            "epsilon": self.epsilon,
            "grid_res": self.grid_res,
            "threshold_offset": self.threshold_offset,
        }

    @property
    def swept_names(self) -> tuple[str, str]:
        return (self.swept[0].name, self.swept[1].name)


def section(name: str, value: float, **kw) -> ScanSpec:
    """One of the standard sections: fix d2 (sweep a2, a3) or a2 (sweep d2, a3)."""
    other = {"d2": "a2", "a2": "d2"}[name]
    return ScanSpec({name: value}, (SweepRange(other), SweepRange("a3")), **kw)


STANDARD_SECTIONS = (("d2", 0.5), ("d2", 1.0), ("a2", 0.5), ("a2", 1.5))


@dataclass
class ScanCell:
    params: DhParams
    verdicts: dict
    near_surface: bool
    threshold: Optional[float] = None

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts.values())) <= 1

    def to_dict(self) -> dict:
        return {
            "params": dict(zip(PARAM_NAMES, self.params.as_tuple())),
            "verdicts": {k.value: v.value for k, v in self.verdicts.items()},
            "agree": self.agree,
            "near_surface": self.near_surface,
            "threshold": self.threshold,
        }


def _threshold(p: DhParams) -> Optional[float]:
    if min(p.a1, p.a2, p.d2) <= 0:
        return None
    return a3_threshold(p.a1, p.a2, p.d2).threshold_low


def _closed_form(p: DhParams, offset: float) -> Verdict:
    result = classify(p)
    if offset == 0.0 or result.threshold is None:
        return result.verdict
    return Verdict.QUATERNARY if p.a3 > result.threshold + offset else Verdict.BINARY


def evaluate_cell(p: DhParams, spec: ScanSpec) -> ScanCell:
    verdicts = {}
    for o in spec.oracles:
        if o is Oracle.CLOSED_FORM:
            verdicts[o] = _closed_form(p, spec.threshold_offset)
        elif o is Oracle.CUSP_SCAN:
            verdicts[o] = numerical_classify(p)
        else:
            verdicts[o] = Verdict.QUATERNARY if grid_iks_oracle(p, spec.grid_res) == 4 else Verdict.BINARY
    thr = _threshold(p)
    near = thr is not None and abs(p.a3 - thr) < spec.epsilon * p.a1
    return ScanCell(p, verdicts, near, thr)


def _evaluate_chunk(args):
    spec, chunk = args
    return [evaluate_cell(p, spec) for p in chunk]


def scan_section(spec: ScanSpec, workers: int = 1, chunk_size: int = 200) -> list[ScanCell]:
    """Evaluate every grid cell; row-major order whatever the worker count."""
    spec.validate()
    grid = spec.grid()
    if workers <= 1:
        return [evaluate_cell(p, spec) for p in grid]
    chunks = [(spec, grid[i : i + chunk_size]) for i in range(0, len(grid), chunk_size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_evaluate_chunk, chunks))
    return [c for part in parts for c in part]


def agreement_report(cells: Sequence[ScanCell]) -> dict:
    """Counts by verdict and the cells where oracles disagree away from the surface.

    Verdict counts use the first oracle of each cell.
    """
    counts = {"total": len(cells), "binary": 0, "quaternary": 0, "near_surface_excluded": 0}
    disagreements = []
    for c in cells:
        first = next(iter(c.verdicts.values()))
        counts["binary" if first is Verdict.BINARY else "quaternary"] += 1
        if c.agree:
            continue
        if c.near_surface:
            counts["near_surface_excluded"] += 1
        else:
            disagreements.append(c.to_dict())
    counts["disagreements"] = len(disagreements)
    return {"counts": counts, "disagreements": disagreements}


def _fmt(v: float) -> str:
    return format(v, ".9g")


def cells_to_csv(spec: ScanSpec, cells: Iterable[ScanCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n0, n1 = spec.swept_names
    w.writerow([n0, n1, *(o.value for o in spec.oracles), "agree", "near_surface"])
    for c in cells:
        vals = dict(zip(PARAM_NAMES, c.params.as_tuple()))
        w.writerow(
            [_fmt(vals[n0]), _fmt(vals[n1]), *(c.verdicts[o].value for o in spec.oracles), int(c.agree), int(c.near_surface)]
        )
    return buf.getvalue()


def summary_json(spec: ScanSpec, cells: Sequence[ScanCell]) -> str:
    report = agreement_report(cells)
    return json.dumps({"spec": spec.to_dict(), **report}, indent=2, sort_keys=True)


def _deterministic_svg(fig) -> str:
    import matplotlib

    matplotlib.rcParams["svg.hashsalt"] = "orthoarm"
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    return buf.getvalue()


def section_svg(spec: ScanSpec, cells: Sequence[ScanCell]) -> str:
    """Binary cells as marks with the threshold curves overlaid."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n0, n1 = spec.swept_names
    oracle = spec.oracles[0]
    xs, ys = [], []
    for c in cells:
        if c.verdicts[oracle] is Verdict.BINARY:
            vals = dict(zip(PARAM_NAMES, c.params.as_tuple()))
            xs.append(vals[n0])
            ys.append(vals[n1])
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(xs, ys, "s", ms=2, color="tab:blue", label=f"binary ({oracle.value})", linestyle="none")
    if n1 == "a3":
        lo, hi = _threshold_curves(spec)
        u = spec.swept[0]
        grid = np.linspace(max(u.start, 1e-3), u.stop, 400)
        ax.plot(grid, lo, color="k", lw=1, label="separating surface")
        ax.plot(grid, hi, color="tab:red", lw=1, ls="--", label="upper branch")
    ax.set_xlabel(n0)
    ax.set_ylabel(n1)
    ax.set_xlim(0, spec.swept[0].stop)
    ax.set_ylim(0, spec.swept[1].stop)
    fixed = ", ".join(f"{k}={v:g}" for k, v in spec.to_dict()["fixed"].items())
    ax.set_title(fixed)
    ax.legend(loc="upper left", fontsize=7)
    text = _deterministic_svg(fig)
    plt.close(fig)
    return text


def _threshold_curves(spec: ScanSpec):
    u = spec.swept[0]
    grid = np.linspace(max(u.start, 1e-3), u.stop, 400)
    lo, hi = [], []
    for v in grid:
        vals = {**spec.fixed, u.name: float(v)}
        t = a3_threshold(vals["a1"], vals["a2"], vals["d2"])
        lo.append(np.nan if t.threshold_low is None else t.threshold_low)
        hi.append(np.nan if t.threshold_high is None else t.threshold_high)
    return np.array(lo), np.array(hi)


@dataclass
class SurfaceMesh:
    a2: np.ndarray
    d2: np.ndarray
    threshold: np.ndarray = field(repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a2", "d2", "threshold_low"])
        for i, a2 in enumerate(self.a2):
            for j, d2 in enumerate(self.d2):
                t = self.threshold[i, j]
                w.writerow([_fmt(a2), _fmt(d2), "" if np.isnan(t) else _fmt(t)])
        return buf.getvalue()


def surface_mesh(a2_range: SweepRange, d2_range: SweepRange) -> SurfaceMesh:
    """Separating-surface heights on an (a2, d2) grid with a1 = 1; NaN marks gaps."""
    a2v, d2v = a2_range.values(), d2_range.values()
    T = np.full((len(a2v), len(d2v)), np.nan)
    for i, a2 in enumerate(a2v):
        for j, d2 in enumerate(d2v):
            if a2 > 0 and d2 > 0:
                t = a3_threshold(1.0, float(a2), float(d2)).threshold_low
                if t is not None:
                    T[i, j] = t
    return SurfaceMesh(a2v, d2v, T)


def write_outputs(spec: ScanSpec, cells: Sequence[ScanCell], stem: Path, formats=("csv", "json", "svg")) -> list[Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    writers = {
        "csv": lambda: cells_to_csv(spec, cells),
        "json": lambda: summary_json(spec, cells),
        "svg": lambda: section_svg(spec, cells),
    }
    paths = []
    for fmt in formats:
        path = stem.with_suffix("." + fmt)
        path.write_text(writers[fmt]())
        paths.append(path)
    return paths
