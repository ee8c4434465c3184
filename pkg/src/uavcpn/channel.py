"""Probabilistic air-ground channel: LoS probability, received power, link latency.

All functions broadcast over numpy arrays of horizontal distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

AVERAGING_MODES = ("power_avg", "rate_avg")
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChannelParams:
    """One directional air-ground link.

    ``averaging`` selects where LoS and NLoS are combined: ``power_avg``
    weights received power before the Shannon log, ``rate_avg`` weights
    the two Shannon rates.
    """

    tx_power: float
    alpha: float
    eta: float
    env_b: float
    env_c: float
    averaging: str = "power_avg"

    def __post_init__(self):
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be > 0, got {self.tx_power}")
        if not self.alpha >= 1:
            raise ValueError(f"path-loss exponent must be >= 1, got {self.alpha}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if not (self.env_b > 0 and self.env_c > 0):
            raise ValueError("environment constants must be positive")
        if self.averaging not in AVERAGING_MODES:
            raise ValueError(f"averaging must be one of {AVERAGING_MODES}")


class LinkGeometry(NamedTuple):
    horizontal_distance: float
    altitude: float


def elevation_deg(distance, altitude):
    # arctan2 yields exactly 90 degrees at zero horizontal distance
    return np.degrees(np.arctan2(altitude, distance))


def los_probability(distance, altitude, env_b: float, env_c: float):
    theta = elevation_deg(distance, altitude)
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + env_c * np.exp(-env_b * (theta - env_c)))


def path_gain(distance, altitude, alpha: float):
    with np.errstate(over="ignore"):
        d2 = np.square(distance) + np.square(altitude)
    return d2 ** (-alpha / 2.0)


def expected_received_power(params: ChannelParams, distance, altitude):
    """LoS/NLoS-weighted mean received power in watts."""
    p = los_probability(distance, altitude, params.env_b, params.env_c)
    weight = p + params.eta * (1.0 - p)
    return weight * params.tx_power * path_gain(distance, altitude, params.alpha)


def spectral_efficiency(params: ChannelParams, distance, altitude, noise: float):
    """Bits/s/Hz under the link's averaging mode."""
    if params.averaging == "power_avg":
        snr = expected_received_power(params, distance, altitude) / noise
        return np.log1p(snr) / _LN2
    p = los_probability(distance, altitude, params.env_b, params.env_c)
    snr_los = params.tx_power * path_gain(distance, altitude, params.alpha) / noise
    return (p * np.log1p(snr_los) + (1.0 - p) * np.log1p(params.eta * snr_los)) / _LN2


def transmission_latency(data_size, params: ChannelParams, distance, altitude,
                         bandwidth: float, noise: float):
    """Seconds to push ``data_size`` bits over the link; ``inf`` if the rate underflows."""
    se = spectral_efficiency(params, distance, altitude, noise)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.asarray(data_size, dtype=float) / (bandwidth * se)
    t = np.where(np.asarray(data_size) == 0, 0.0, np.where(se > 0, t, np.inf))
    return t[()]


def latency_function(data_size: float, params: ChannelParams, altitude: float,
                     bandwidth: float, noise: float):
    """Scalar ``distance -> latency`` closure for root-finding and quadrature.

    Same arithmetic as :func:`transmission_latency` on plain floats; numpy
    dispatch dominates the cost of single-point evaluation.
    """
    b, c, eta, alpha = params.env_b, params.env_c, params.eta, params.alpha
    p_tx, h2 = params.tx_power, altitude * altitude
    deg = 180.0 / math.pi
    power_avg = params.averaging == "power_avg"
    exp, log1p, atan2 = math.exp, math.log1p, math.atan2

    def latency(r: float) -> float:
        if data_size == 0:
            return 0.0
        z = -b * (deg * atan2(altitude, r) - c)
        p = 0.0 if z > 700.0 else 1.0 / (1.0 + c * exp(z))
        snr = p_tx * (r * r + h2) ** (-alpha / 2.0) / noise
        if power_avg:
            se = log1p((p + eta * (1.0 - p)) * snr) / _LN2
        else:
            se = (p * log1p(snr) + (1.0 - p) * log1p(eta * snr)) / _LN2
        if se <= 0:
            return math.inf
        return data_size / (bandwidth * se)

    return latency
