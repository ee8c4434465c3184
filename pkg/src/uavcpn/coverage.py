"""Communication-constrained service radius and thinned CN density."""
from __future__ import annotations

import math
from typing import NamedTuple

from scipy.optimize import bisect

from .channel import ChannelParams, latency_function
from .compute import ComputeLatencyModel

R_CAP = 1e7
RADIUS_XTOL = 1e-6


class ServiceRadius(NamedTuple):
    radius: float
    capped: bool
    residual_budget: float


def max_service_radius(residual: float, down: ChannelParams, altitude: float, data_size: float,
                       bandwidth: float, noise: float) -> ServiceRadius:
    """Largest CN distance whose forwarding latency fits in ``residual`` seconds.

    Radius is 0 when even a CN directly below the UAV is out of budget, and
    ``R_CAP`` (``capped=True``) when the budget outlasts the search ceiling.
    """
    if not math.isfinite(residual):
        raise ValueError(f"residual budget must be finite, got {residual}")
    if not altitude > 0 or not data_size > 0:
        raise ValueError("altitude and data size must be positive")
    t2 = latency_function(data_size, down, altitude, bandwidth, noise)
    if residual <= t2(0.0):
        return ServiceRadius(0.0, False, residual)
    lo, hi = 0.0, altitude
    while t2(hi) < residual:
        if hi >= R_CAP:
            return ServiceRadius(R_CAP, True, residual)
        lo, hi = hi, min(2.0 * hi, R_CAP)
    r = bisect(lambda x: t2(x) - residual, lo, hi, xtol=RADIUS_XTOL)
    return ServiceRadius(r, False, residual)


def effective_density(cn_density: float, r_c: float, service: ServiceRadius, residual_after_t2: float,
                      model: ComputeLatencyModel, workload: float) -> float:
    """Density of CNs at distance ``r_c`` that meet both the link and compute deadlines."""
    if r_c > service.radius:
        return 0.0
    return cn_density * float(model.cdf(residual_after_t2, workload))
