"""Computing-latency distributions at the computing nodes.

Each model exposes a CDF for the analytical engine and a sampler for the
Monte Carlo engine.  All times are in seconds, workloads in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ComputeLatencyModel:
    """Base class.  Subclasses are frozen dataclasses."""

    tag: str = ""

    def cdf(self, t, workload: float = 0.0):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None, workload: float = 0.0):
        raise NotImplementedError

    def breakpoints(self, workload: float = 0.0) -> tuple[float, ...]:
        """Latencies at which the CDF is not smooth (jumps or kinks)."""
        return ()

    @property
    def is_degenerate(self) -> bool:
        return False

    def mean(self, workload: float = 0.0) -> float:
        raise NotImplementedError

    def with_mean(self, mean: float) -> "ComputeLatencyModel":
        raise NotImplementedError

    def to_tag(self) -> str:
        """Config-file representation, parameters in milliseconds."""
        raise NotImplementedError


@dataclass(frozen=True)
class Deterministic(ComputeLatencyModel):
    t_c: float
    tag = "deterministic"

    def __post_init__(self):
        if not self.t_c > 0 or not np.isfinite(self.t_c):
            raise ValueError(f"deterministic latency must be positive and finite, got {self.t_c}")

    def cdf(self, t, workload=0.0):
        # closed inequality: P(t_c <= t) is 1 at t == t_c
        return np.where(np.asarray(t) >= self.t_c, 1.0, 0.0)[()]

    def sample(self, rng, size=None, workload=0.0):
        if size is None:
            return self.t_c
        return np.full(size, self.t_c)

    def breakpoints(self, workload=0.0):
        return (self.t_c,)

    @property
    def is_degenerate(self):
        return True

    def mean(self, workload=0.0):
        return self.t_c

    def with_mean(self, mean):
        return Deterministic(mean)

    def to_tag(self):
        return f"deterministic:{self.t_c * 1e3:.12g}"


@dataclass(frozen=True)
class Exponential(ComputeLatencyModel):
    mean_latency: float
    tag = "exponential"

    def __post_init__(self):
        if not self.mean_latency > 0 or not np.isfinite(self.mean_latency):
            raise ValueError(f"exponential mean must be positive and finite, got {self.mean_latency}")

    def cdf(self, t, workload=0.0):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, -np.expm1(-np.maximum(t, 0.0) / self.mean_latency), 0.0)[()]

    def sample(self, rng, size=None, workload=0.0):
        return rng.exponential(self.mean_latency, size)

    def breakpoints(self, workload=0.0):
        return (0.0,)

    def mean(self, workload=0.0):
        return self.mean_latency

    def with_mean(self, mean):
        return Exponential(mean)

    def to_tag(self):
        return f"exponential:{self.mean_latency * 1e3:.12g}"


@dataclass(frozen=True)
class ShiftedExponential(ComputeLatencyModel):
    floor: float
    mean_excess: float
    tag = "shifted_exponential"

    def __post_init__(self):
        if not self.floor >= 0 or not np.isfinite(self.floor):
            raise ValueError(f"shifted exponential floor must be >= 0, got {self.floor}")
        if not self.mean_excess > 0 or not np.isfinite(self.mean_excess):
            raise ValueError(f"shifted exponential mean excess must be > 0, got {self.mean_excess}")

    def cdf(self, t, workload=0.0):
        t = np.asarray(t, dtype=float)
        x = np.maximum(t - self.floor, 0.0)
        return np.where(t >= self.floor, -np.expm1(-x / self.mean_excess), 0.0)[()]

    def sample(self, rng, size=None, workload=0.0):
        return self.floor + rng.exponential(self.mean_excess, size)

    def breakpoints(self, workload=0.0):
        return (self.floor,)

    def mean(self, workload=0.0):
        return self.floor + self.mean_excess

    def with_mean(self, mean):
        if mean <= self.floor:
            raise ValueError(f"mean {mean} must exceed the latency floor {self.floor}")
        return ShiftedExponential(self.floor, mean - self.floor)

    def to_tag(self):
        return f"shifted_exponential:{self.floor * 1e3:.12g}+{self.mean_excess * 1e3:.12g}"


@dataclass(frozen=True)
class EmpiricalTable(ComputeLatencyModel):
    """Step CDF from measured (latency, cumulative probability) pairs.

    With ``reference_workload`` set, latencies scale linearly with
    ``workload / reference_workload``; otherwise workload is ignored.
    """

    latencies: tuple[float, ...]
    probabilities: tuple[float, ...]
    reference_workload: float | None = None
    tag = "empirical"
    _lat: np.ndarray = field(init=False, repr=False, compare=False)
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lat = np.asarray(self.latencies, dtype=float)
        cum = np.asarray(self.probabilities, dtype=float)
        if lat.ndim != 1 or lat.size == 0 or lat.shape != cum.shape:
            raise ValueError("empirical table needs matching, non-empty latency and probability lists")
        if np.any(lat <= 0) or not np.all(np.isfinite(lat)):
            raise ValueError("empirical latencies must be positive and finite")
        if np.any(np.diff(lat) <= 0):
            raise ValueError("empirical latencies must be strictly increasing")
        if np.any(np.diff(cum) < 0) or cum[0] < 0 or cum[-1] != 1.0:
            raise ValueError("cumulative probabilities must be nondecreasing in [0, 1] and end at 1")
        if self.reference_workload is not None and not self.reference_workload > 0:
            raise ValueError("reference workload must be positive")
        object.__setattr__(self, "_lat", lat)
        object.__setattr__(self, "_cum", cum)

    def _scale(self, workload):
        if self.reference_workload is None:
            return 1.0
        return workload / self.reference_workload

    def cdf(self, t, workload=0.0):
        lat = self._lat * self._scale(workload)
        idx = np.searchsorted(lat, np.asarray(t, dtype=float), side="right")
        return np.concatenate(([0.0], self._cum))[idx][()]

    def sample(self, rng, size=None, workload=0.0):
        lat = self._lat * self._scale(workload)
        u = rng.random(size)
        # first level whose cumulative probability reaches u
        idx = np.searchsorted(self._cum, u, side="right")
        return lat[np.minimum(idx, lat.size - 1)][()]

    def breakpoints(self, workload=0.0):
        return tuple(self._lat * self._scale(workload))

    @property
    def is_degenerate(self):
        return self._cum[0] == 1.0

    def mean(self, workload=0.0):
        pmf = np.diff(np.concatenate(([0.0], self._cum)))
        return float(np.dot(pmf, self._lat) * self._scale(workload))

    def with_mean(self, mean):
        factor = mean / self.mean()
        return EmpiricalTable(tuple(self._lat * factor), self.probabilities, self.reference_workload)

    def to_tag(self):
        pairs = ",".join(f"{l * 1e3:.12g}@{p:.12g}" for l, p in zip(self.latencies, self.probabilities))
        return f"empirical:{pairs}"


def latency_cdf(model: ComputeLatencyModel, t_res, workload: float):
    """P(t_c <= t_res) for the given model."""
    return model.cdf(t_res, workload)


def sample_latency(model: ComputeLatencyModel, rng: np.random.Generator, workload: float, size=None):
    return model.sample(rng, size, workload)


def parse_model(text: str) -> ComputeLatencyModel:
    """Parse a model tag such as ``deterministic:0.2`` (milliseconds)."""
    tag, sep, params = text.strip().partition(":")
    tag = tag.strip().lower()
    if not sep or not params.strip():
        raise ValueError(f"compute latency model {text!r} needs 'tag:params'")
    ms = 1e-3
    try:
        if tag == "deterministic":
            return Deterministic(float(params) * ms)
        if tag == "exponential":
            return Exponential(float(params) * ms)
        if tag == "shifted_exponential":
            floor, plus, excess = params.partition("+")
            if not plus:
                raise ValueError("expected 'floor+mean_excess'")
            return ShiftedExponential(float(floor) * ms, float(excess) * ms)
        if tag == "empirical":
            lat, cum = [], []
            for item in params.split(","):
                l, at, p = item.partition("@")
                if not at:
                    raise ValueError(f"expected 'latency@probability', got {item!r}")
                lat.append(float(l) * ms)
                cum.append(float(p))
            return EmpiricalTable(tuple(lat), tuple(cum))
    except ValueError as exc:
        raise ValueError(f"bad compute latency model {text!r}: {exc}") from None
    raise ValueError(f"unknown compute latency model tag {tag!r}")
