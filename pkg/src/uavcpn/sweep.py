"""Parameter sweeps and theory-versus-simulation comparison."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import __version__
from .analysis import evaluate_average, evaluate_point
from .montecarlo import estimate_success
from .units import ScenarioConfig, to_raw

ENGINES = ("theory", "mc", "both")


class AxisDef(NamedTuple):
    column: str
    apply: Callable[[ScenarioConfig, float], ScenarioConfig]


# values are given in config-file units
AXES: dict[str, AxisDef] = {
    "altitude": AxisDef("altitude_m", lambda c, v: c.replace(altitude=v)),
    "cn_density": AxisDef("cn_density_per_km2", lambda c, v: c.replace(cn_density=v * 1e-6)),
    "cn_dist_radius": AxisDef("cn_dist_radius_m", lambda c, v: c.replace(cn_dist_radius=v)),
    "t_max": AxisDef("t_max_ms", lambda c, v: c.replace(t_max=v * 1e-3)),
    "compute_latency": AxisDef(
        "compute_latency_ms", lambda c, v: c.replace(compute_model=c.compute_model.with_mean(v * 1e-3))
    ),
}


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"unknown sweep axis {self.name!r}; choose from {sorted(AXES)}")
        if self.points < 2:
            raise ValueError(f"axis {self.name}: need at least 2 points")
        if not (self.start > 0 and self.stop > 0 and math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError(f"axis {self.name}: range must be positive and finite")

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name:start:stop:points[:log|lin]``"""
        parts = text.split(":")
        if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "lin")):
            raise ValueError(f"axis {text!r} must look like name:start:stop:points[:log]")
        return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]),
                   len(parts) == 5 and parts[4] == "log")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    @property
    def column(self) -> str:
        return AXES[self.name].column


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[Axis, ...]
    engine: str = "theory"
    n_trials: int = 1000
    gus_per_trial: int = 400
    seed: int = 0
    confidence: float = 0.99

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs one or two axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ValueError("sweep axes must be distinct")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")

    def grid(self) -> list[tuple[float, ...]]:
        """Grid points in row-major order (first axis outermost)."""
        return list(itertools.product(*(a.values().tolist() for a in self.axes)))

    def columns(self) -> list[str]:
        cols = [a.column for a in self.axes]
        if self.engine in ("theory", "both"):
            cols.append("theory_prob")
        if self.engine in ("mc", "both"):
            cols += ["mc_mean", "mc_ci"]
        return cols + ["lambda_center", "service_radius_center_m", "wall_time_s"]


@dataclass
class SweepRecord:
    values: tuple[float, ...]
    lambda_center: float
    service_radius_center: float
    wall_time: float
    theory_prob: float | None = None
    mc_mean: float | None = None
    mc_ci: float | None = None
    converged: bool = True

    def row(self, spec: SweepSpec) -> dict:
        out = {a.column: v for a, v in zip(spec.axes, self.values)}
        out.update(theory_prob=self.theory_prob, mc_mean=self.mc_mean, mc_ci=self.mc_ci,
                   lambda_center=self.lambda_center, service_radius_center_m=self.service_radius_center,
                   wall_time_s=self.wall_time)
        return {k: out[k] for k in spec.columns()}


def apply_point(cfg: ScenarioConfig, spec: SweepSpec, values) -> ScenarioConfig:
    for axis, v in zip(spec.axes, values):
        cfg = AXES[axis.name].apply(cfg, float(v))
    return cfg


def _evaluate(args) -> SweepRecord:
    base, spec, values = args
    start = time.perf_counter()
    cfg = apply_point(base, spec, values)
    centre = evaluate_point(0.0, cfg)
    rec = SweepRecord(tuple(values), centre.lambda_intensity, centre.service_radius, 0.0,
                      converged=centre.converged)
    if spec.engine in ("theory", "both"):
        avg = evaluate_average(cfg)
        rec.theory_prob, rec.converged = avg.success_prob, rec.converged and avg.converged
    if spec.engine in ("mc", "both"):
        est = estimate_success(cfg, spec.n_trials, spec.gus_per_trial, spec.seed, spec.confidence)
        rec.mc_mean, rec.mc_ci = est.mean, est.ci_halfwidth
    rec.wall_time = time.perf_counter() - start
    return rec


def run_sweep(spec: SweepSpec, base: ScenarioConfig, jobs: int = 1) -> list[SweepRecord]:
    tasks = [(base, spec, v) for v in spec.grid()]
    if jobs <= 1:
        return [_evaluate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves grid order whatever the completion order
        return list(pool.map(_evaluate, tasks))


def _fmt(v):
    return "" if v is None else repr(float(v))


def header_lines(spec: SweepSpec, base: ScenarioConfig) -> list[str]:
    lines = [f"uavcpn {__version__}", f"engine = {spec.engine}"]
    lines += [f"axis = {a.name}:{a.start!r}:{a.stop!r}:{a.points}{':log' if a.log else ''}" for a in spec.axes]
    if spec.engine != "theory":
        lines += [f"n_trials = {spec.n_trials}", f"gus_per_trial = {spec.gus_per_trial}",
                  f"seed = {spec.seed}", f"confidence = {spec.confidence!r}"]
    lines += [f"config {k} = {v}" for k, v in to_raw(base).items()]
    return lines


def to_csv(spec: SweepSpec, base: ScenarioConfig, records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    for line in header_lines(spec, base):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    cols = spec.columns()
    writer.writerow(cols)
    for rec in records:
        row = rec.row(spec)
        writer.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def to_json(spec: SweepSpec, base: ScenarioConfig, records: list[SweepRecord]) -> str:
    doc = {
        "version": __version__,
        "spec": asdict(spec),
        "config": to_raw(base),
        "columns": spec.columns(),
        "rows": [rec.row(spec) for rec in records],
    }
    return json.dumps(doc, indent=2)


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Parse a sweep CSV back into (header comments, rows of floats or None)."""
    comments, body = [], []
    for line in text.splitlines():
        (comments if line.startswith("#") else body).append(line)
    rows = []
    for rec in csv.DictReader(body):
        rows.append({k: (float(v) if v != "" else None) for k, v in rec.items()})
    return [c[1:].strip() for c in comments], rows


class CompareRow(NamedTuple):
    altitude: float
    theory: float
    mc: float
    ci: float
    delta: float
    passed: bool


def compare_tolerance(ci: float) -> float:
    return max(0.01, 3.0 * ci)


def compare(base: ScenarioConfig, altitudes, n_trials: int = 10_000, gus_per_trial: int = 400,
            seed: int = 0, confidence: float = 0.99, jobs: int = 1) -> list[CompareRow]:
    rows = []
    for h in altitudes:
        cfg = base.replace(altitude=float(h))
        theory = evaluate_average(cfg).success_prob
        est = estimate_success(cfg, n_trials, gus_per_trial, seed, confidence, jobs)
        delta = abs(theory - est.mean)
        rows.append(CompareRow(float(h), theory, est.mean, est.ci_halfwidth, delta,
                               delta <= compare_tolerance(est.ci_halfwidth)))
    return rows
