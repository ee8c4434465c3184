"""Analytical task completion probability.

The chain is: uplink latency t1(r_u) -> service radius -> qualified-CN
intensity (an integral of the compute-latency CDF over the service disc)
-> per-GU success probability 1 - exp(-intensity) -> average over the
GU radial density 2 r / R^2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

from scipy.integrate import IntegrationWarning, quad

from .channel import latency_function
from .coverage import max_service_radius
from .units import ScenarioConfig

INNER_RTOL = 1e-8
OUTER_RTOL = 1e-6


class QuadResult(NamedTuple):
    value: float
    error: float
    converged: bool


def integrate(f: Callable[[float], float], a: float, b: float, rel_tol: float = 1e-8,
              abs_tol: float = 1e-12, points=None, limit: int = 200) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    ``points`` are known non-smooth locations used as forced subdivision
    points.  Hitting the subdivision limit does not raise; the result is
    returned with ``converged=False``.
    """
    if b < a:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0, True)
    pts = sorted({p for p in (points or ()) if a < p < b}) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        out = quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit, points=pts, full_output=1)
    # quad appends a message only when ier != 0
    return QuadResult(float(out[0]), float(out[1]), len(out) == 3)


@dataclass(frozen=True)
class AnalysisResult:
    """Analytical evaluation at one GU distance, or GU-averaged when ``r_u`` is None.

    For averaged results ``lambda_intensity`` is the GU-averaged intensity,
    while ``service_radius`` and ``t1`` describe a GU at the zone centre.
    """

    r_u: float | None
    lambda_intensity: float
    success_prob: float
    service_radius: float
    t1: float
    quadrature_error_estimate: float
    converged: bool = True


class _Links:
    def __init__(self, cfg: ScenarioConfig):
        args = (cfg.altitude, cfg.bandwidth, cfg.noise_power)
        self.t1 = latency_function(cfg.data_size, cfg.uplink(), *args)
        self.t2 = latency_function(cfg.data_size, cfg.downlink(), *args)


def _service(cfg, residual):
    return max_service_radius(residual, cfg.downlink(), cfg.altitude, cfg.data_size,
                              cfg.bandwidth, cfg.noise_power)


def evaluate_point(r_u: float, cfg: ScenarioConfig, rel_tol: float = INNER_RTOL,
                   links: _Links | None = None) -> AnalysisResult:
    if r_u < 0:
        raise ValueError(f"r_u must be >= 0, got {r_u}")
    links = links or _Links(cfg)
    t1 = links.t1(r_u)
    if not t1 < cfg.t_max:
        # GU is comm-limited on the uplink alone
        return AnalysisResult(r_u, 0.0, 0.0, 0.0, t1, 0.0)
    residual = cfg.t_max - t1
    service = _service(cfg, residual)
    upper = min(service.radius, cfg.cn_dist_radius)
    if upper <= 0 or cfg.cn_density == 0:
        return AnalysisResult(r_u, 0.0, 0.0, service.radius, t1, 0.0)

    model, workload, t2 = cfg.compute_model, cfg.data_size, links.t2
    t2_floor = t2(0.0)
    kinks = []
    for latency in model.breakpoints(workload):
        res = residual - latency
        if res > t2_floor:
            r = _service(cfg, res).radius
            if 0 < r < upper:
                kinks.append(r)

    def integrand(r):
        return float(model.cdf(residual - t2(r), workload)) * r

    quad_res = integrate(integrand, 0.0, upper, rel_tol=rel_tol, abs_tol=1e-12 * upper * upper, points=kinks)
    scale = 2.0 * math.pi * cfg.cn_density
    lam = scale * quad_res.value
    return AnalysisResult(r_u, lam, 1.0 - math.exp(-lam), service.radius, t1,
                          scale * quad_res.error, quad_res.converged)


def qualified_intensity(r_u: float, cfg: ScenarioConfig) -> float:
    """Expected number of CNs able to finish the GU's task in time."""
    return evaluate_point(r_u, cfg).lambda_intensity


def success_probability(r_u: float, cfg: ScenarioConfig) -> float:
    return evaluate_point(r_u, cfg).success_prob


def spatial_average(p_of_r: Callable[[float], float], request_radius: float,
                    rel_tol: float = OUTER_RTOL, abs_tol: float = 1e-10) -> QuadResult:
    """Average ``p_of_r`` over GUs uniform on a disc of ``request_radius``."""
    res = integrate(lambda r: p_of_r(r) * r, 0.0, request_radius, rel_tol=rel_tol,
                    abs_tol=abs_tol * request_radius ** 2 / 2.0)
    scale = 2.0 / request_radius ** 2
    return QuadResult(scale * res.value, scale * res.error, res.converged)


def evaluate_average(cfg: ScenarioConfig, rel_tol: float = OUTER_RTOL) -> AnalysisResult:
    links = _Links(cfg)
    cache: dict[float, AnalysisResult] = {}

    def point(r):
        res = cache.get(r)
        if res is None:
            res = cache[r] = evaluate_point(r, cfg, links=links)
        return res

    avg = spatial_average(lambda r: point(r).success_prob, cfg.request_radius, rel_tol)
    lam = spatial_average(lambda r: point(r).lambda_intensity, cfg.request_radius, rel_tol)
    centre = point(0.0)
    converged = avg.converged and lam.converged and all(r.converged for r in cache.values())
    inner_err = max((r.quadrature_error_estimate for r in cache.values()), default=0.0)
    return AnalysisResult(None, lam.value, min(max(avg.value, 0.0), 1.0), centre.service_radius,
                          centre.t1, avg.error + inner_err, converged)


def average_success_probability(cfg: ScenarioConfig) -> float:
    """GU-averaged task completion probability over the request zone."""
    return evaluate_average(cfg).success_prob
