"""Monte Carlo validation of the analytical engine.

Each trial draws one CN realization (a PPP on a disc around the UAV's
ground projection), shared by all GUs of the trial.  Every (GU, CN) pair
gets its own computing-latency draw.  Random streams are Philox
(counter-based) keyed by ``(seed, trial index, purpose)``, so a trial's
outcome depends only on its index and results do not change with the
number of worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from statistics import NormalDist
from typing import Iterator, NamedTuple

import numpy as np

from .channel import transmission_latency
from .coverage import max_service_radius
from .units import ScenarioConfig

PURPOSES = {"cn": 0, "gu": 1, "compute": 2}
MAX_EXPECTED_POINTS = 5e6


def stream(seed: int, trial: int, purpose: str) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(trial, PURPOSES[purpose]))
    return np.random.Generator(np.random.Philox(ss))


class TrialStreams:
    """Lazily created per-purpose generators for one trial."""

    def __init__(self, seed: int, trial: int):
        self.seed, self.trial = seed, trial

    @cached_property
    def cn(self):
        return stream(self.seed, self.trial, "cn")

    @cached_property
    def gu(self):
        return stream(self.seed, self.trial, "gu")

    @cached_property
    def compute(self):
        return stream(self.seed, self.trial, "compute")


class _SingleStream:
    def __init__(self, rng):
        self.cn = self.gu = self.compute = rng


def sample_ppp_disc(density: float, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP on a centred disc, as an ``(n, 2)`` array of points."""
    if density < 0 or not (0 <= radius < math.inf):
        raise ValueError("density must be >= 0 and radius finite and >= 0")
    mean = density * math.pi * radius * radius
    if mean > MAX_EXPECTED_POINTS:
        raise ValueError(f"PPP disc would hold ~{mean:.3g} points; shrink the radius or density")
    n = rng.poisson(mean) if mean > 0 else 0
    rho = radius * np.sqrt(rng.random(n))
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi)))


def simulation_radius(cfg: ScenarioConfig) -> float:
    """Disc radius beyond which no CN can ever qualify."""
    if math.isfinite(cfg.cn_dist_radius):
        return cfg.cn_dist_radius
    t1 = float(transmission_latency(cfg.data_size, cfg.uplink(), 0.0, cfg.altitude,
                                    cfg.bandwidth, cfg.noise_power))
    if not t1 < cfg.t_max:
        return 0.0
    return max_service_radius(cfg.t_max - t1, cfg.downlink(), cfg.altitude, cfg.data_size,
                              cfg.bandwidth, cfg.noise_power).radius


@dataclass(frozen=True)
class TrialOutcome:
    gu_position: float
    served: bool
    best_e2e_latency: float | None
    qualified_cn_count: int


@dataclass(frozen=True)
class TrialOutcomes:
    """Per-GU outcomes of one trial as parallel arrays (NaN latency = no CN)."""

    gu_radius: np.ndarray
    served: np.ndarray
    best_e2e_latency: np.ndarray
    qualified_cn_count: np.ndarray

    def __len__(self):
        return self.gu_radius.size

    def __iter__(self) -> Iterator[TrialOutcome]:
        for r, s, t, k in zip(self.gu_radius, self.served, self.best_e2e_latency, self.qualified_cn_count):
            yield TrialOutcome(float(r), bool(s), None if np.isnan(t) else float(t), int(k))


class Simulator:
    """Trial runner with the per-config work (disc radius) done once."""

    def __init__(self, cfg: ScenarioConfig, disc_radius: float | None = None):
        self.cfg = cfg
        self.disc_radius = simulation_radius(cfg) if disc_radius is None else disc_radius
        self._up, self._down = cfg.uplink(), cfg.downlink()

    def _latency(self, params, r):
        cfg = self.cfg
        return transmission_latency(cfg.data_size, params, r, cfg.altitude, cfg.bandwidth, cfg.noise_power)

    def trial(self, streams, gus_per_trial: int = 1, gu_radii=None) -> TrialOutcomes:
        cfg = self.cfg
        if isinstance(streams, np.random.Generator):
            streams = _SingleStream(streams)
        cns = sample_ppp_disc(cfg.cn_density, self.disc_radius, streams.cn)
        if gu_radii is None:
            if gus_per_trial < 1:
                raise ValueError("gus_per_trial must be >= 1")
            gu_radii = cfg.request_radius * np.sqrt(streams.gu.random(gus_per_trial))
        gu_radii = np.asarray(gu_radii, dtype=float).reshape(-1)
        n_gu, n_cn = gu_radii.size, cns.shape[0]
        t1 = np.atleast_1d(self._latency(self._up, gu_radii))
        if n_cn == 0:
            return TrialOutcomes(gu_radii, np.zeros(n_gu, bool), np.full(n_gu, np.nan), np.zeros(n_gu, int))
        t2 = np.atleast_1d(self._latency(self._down, np.hypot(cns[:, 0], cns[:, 1])))
        model = cfg.compute_model
        if model.is_degenerate:
            tc = model.mean(cfg.data_size)
            t2 = np.sort(t2)
            base = t1 + tc
            best = base + t2[0]
            served = best <= cfg.t_max
            count = np.searchsorted(t2, cfg.t_max - base, side="right")
            # keep count consistent with ``served`` when rounding lands on the deadline
            count = np.where(served, np.maximum(count, 1), 0)
        else:
            tc = model.sample(streams.compute, (n_gu, n_cn), cfg.data_size)
            e2e = t1[:, None] + t2[None, :] + tc
            best = e2e.min(axis=1)
            count = np.count_nonzero(e2e <= cfg.t_max, axis=1)
            served = best <= cfg.t_max
        return TrialOutcomes(gu_radii, served, best, count)


def run_trial(cfg: ScenarioConfig, gus_per_trial: int, rng, gu_radii=None) -> TrialOutcomes:
    """One trial: a CN realization shared by ``gus_per_trial`` uniformly placed GUs.

    ``rng`` is a numpy Generator or a :class:`TrialStreams`.
    """
    return Simulator(cfg).trial(rng, gus_per_trial, gu_radii)


class Estimate(NamedTuple):
    mean: float
    ci_halfwidth: float
    confidence_level: float
    n_trials: int
    seed: int
    gus_per_trial: int = 1


def _served_counts(args) -> np.ndarray:
    cfg, disc_radius, seed, gus, start, stop = args
    sim = Simulator(cfg, disc_radius)
    out = np.empty(stop - start, dtype=np.int64)
    for i, trial in enumerate(range(start, stop)):
        out[i] = np.count_nonzero(sim.trial(TrialStreams(seed, trial), gus).served)
    return out


def _probe(args):
    cfg, disc_radius, seed, r_u, start, stop = args
    sim = Simulator(cfg, disc_radius)
    counts = np.empty(stop - start, dtype=np.int64)
    served = np.empty(stop - start, dtype=bool)
    for i, trial in enumerate(range(start, stop)):
        res = sim.trial(TrialStreams(seed, trial), gu_radii=[r_u])
        counts[i], served[i] = res.qualified_cn_count[0], res.served[0]
    return counts, served


def _chunks(n, jobs):
    n_chunks = max(1, min(n, jobs * 4))
    edges = np.linspace(0, n, n_chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def ci_halfwidth(samples: np.ndarray, confidence: float) -> float:
    """Normal-approximation half-width of the mean of i.i.d. ``samples``."""
    n = samples.size
    if n < 2:
        return 0.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    return float(z * np.std(samples, ddof=1) / math.sqrt(n))


def estimate_success(cfg: ScenarioConfig, n_trials: int = 10_000, gus_per_trial: int = 400,
                     seed: int = 0, confidence: float = 0.99, jobs: int = 1) -> Estimate:
    """Served fraction over ``n_trials * gus_per_trial`` simulated GUs.

    The confidence interval treats trials, not GUs, as independent units.
    """
    if n_trials < 1 or gus_per_trial < 1:
        raise ValueError("n_trials and gus_per_trial must be >= 1")
    disc = simulation_radius(cfg)
    tasks = [(cfg, disc, seed, gus_per_trial, a, b) for a, b in _chunks(n_trials, jobs)]
    counts = np.concatenate(_map(_served_counts, tasks, jobs))
    mean = float(counts.sum()) / (n_trials * gus_per_trial)
    half = ci_halfwidth(counts / gus_per_trial, confidence)
    return Estimate(mean, half, confidence, n_trials, seed, gus_per_trial)


def probe_radius(cfg: ScenarioConfig, r_u: float, n_trials: int, seed: int = 0,
                 jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Qualified-CN counts and served flags for a single GU pinned at ``r_u``, one per trial."""
    disc = simulation_radius(cfg)
    tasks = [(cfg, disc, seed, r_u, a, b) for a, b in _chunks(n_trials, jobs)]
    parts = _map(_probe, tasks, jobs)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
