"""Configuration loading and unit normalization.

Config files are flat ``key = value`` text with ``#`` comments, in the
human units of the parameter table (dBW, dBm, MHz, ms, MB, nodes/km^2).
Everything is normalized to SI on load.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Mapping, NamedTuple

from .channel import AVERAGING_MODES, ChannelParams
from .compute import ComputeLatencyModel, Deterministic, parse_model

CONFIG_ENV_VAR = "UAVCPN_CONFIG"


class ConfigError(ValueError):
    """Raised for malformed, unknown or invalid configuration entries."""


def db_to_linear(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"decibel value must be finite, got {x}")
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"linear ratio must be positive and finite, got {x}")
    return 10.0 * math.log10(x)


def dbm_to_watts(x: float) -> float:
    return db_to_linear(x) / 1000.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Experiment description in SI units (W, Hz, s, bits, m, nodes/m^2)."""

    tx_power_gu: float = 100.0
    tx_power_uav: float = 100.0
    alpha_up: float = 2.0
    alpha_down: float = 2.0
    eta: float = 0.01
    bandwidth: float = 8e6
    noise_power: float = 1e-15
    data_size: float = 8e6
    t_max: float = 0.055
    gu_density: float = 5e-4
    cn_density: float = 5e-6
    request_radius: float = 200.0
    cn_dist_radius: float = math.inf
    env_b: float = 0.136
    env_c: float = 11.95
    env_b_down: float | None = None
    env_c_down: float | None = None
    altitude: float = 200.0
    compute_model: ComputeLatencyModel = field(default_factory=lambda: Deterministic(2e-4))
    averaging: str = "power_avg"

    def uplink(self) -> ChannelParams:
        return ChannelParams(self.tx_power_gu, self.alpha_up, self.eta, self.env_b, self.env_c, self.averaging)

    def downlink(self) -> ChannelParams:
        b = self.env_b if self.env_b_down is None else self.env_b_down
        c = self.env_c if self.env_c_down is None else self.env_c_down
        return ChannelParams(self.tx_power_uav, self.alpha_down, self.eta, b, c, self.averaging)

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


class Violation(NamedTuple):
    field: str
    value: object
    constraint: str

    def __str__(self):
        return f"{self.field} = {self.value!r}: must be {self.constraint}"


def _check(out, name, value, ok, constraint):
    if not ok:
        out.append(Violation(name, value, constraint))


def validate(cfg: ScenarioConfig) -> list[Violation]:
    """Return all invariant violations; an empty list means valid."""
    out: list[Violation] = []
    pos_finite = [
        "tx_power_gu", "tx_power_uav", "bandwidth", "noise_power", "data_size",
        "request_radius", "env_b", "env_c", "altitude",
    ]
    for name in pos_finite:
        v = getattr(cfg, name)
        _check(out, name, v, isinstance(v, (int, float)) and math.isfinite(v) and v > 0, "positive and finite")
    # t_max may be +inf (unconstrained deadline)
    _check(out, "t_max", cfg.t_max, cfg.t_max > 0, "> 0")
    for name in ("alpha_up", "alpha_down"):
        v = getattr(cfg, name)
        _check(out, name, v, math.isfinite(v) and v >= 1, ">= 1")
    _check(out, "eta", cfg.eta, 0 < cfg.eta <= 1, "in (0, 1]")
    for name in ("gu_density", "cn_density"):
        v = getattr(cfg, name)
        _check(out, name, v, math.isfinite(v) and v >= 0, "nonnegative and finite")
    _check(out, "cn_dist_radius", cfg.cn_dist_radius, cfg.cn_dist_radius >= 0, ">= 0 (inf for unbounded)")
    for name in ("env_b_down", "env_c_down"):
        v = getattr(cfg, name)
        if v is not None:
            _check(out, name, v, math.isfinite(v) and v > 0, "positive and finite")
    _check(out, "compute_model", cfg.compute_model, isinstance(cfg.compute_model, ComputeLatencyModel),
           "a compute latency model")
    _check(out, "averaging", cfg.averaging, cfg.averaging in AVERAGING_MODES, f"one of {AVERAGING_MODES}")
    return out


def _number(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise ValueError("NaN")
    return v


def _finite(text: str) -> float:
    v = _number(text)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _radius(text: str) -> float:
    if text.strip().lower() in ("inf", "none", "unbounded"):
        return math.inf
    return _finite(text)


def _optional(text: str) -> float | None:
    if text.strip().lower() in ("", "none", "same"):
        return None
    return _finite(text)


def _mode(text: str) -> str:
    if text not in AVERAGING_MODES:
        raise ValueError(f"expected one of {AVERAGING_MODES}")
    return text


class _Key(NamedTuple):
    target: str
    parse: Callable[[str], object]
    to_si: Callable[[object], object]
    default: str


# raw key -> ScenarioConfig field; one-to-one
RAW_KEYS: dict[str, _Key] = {
    "tx_power_gu_dbw": _Key("tx_power_gu", _finite, db_to_linear, "20"),
    "tx_power_uav_dbw": _Key("tx_power_uav", _finite, db_to_linear, "20"),
    "pathloss_exp_up": _Key("alpha_up", _finite, float, "2"),
    "pathloss_exp_down": _Key("alpha_down", _finite, float, "same"),
    "nlos_attenuation_db": _Key("eta", _finite, lambda db: db_to_linear(-db), "20"),
    "bandwidth_mhz": _Key("bandwidth", _finite, lambda v: v * 1e6, "8"),
    "noise_dbm": _Key("noise_power", _finite, dbm_to_watts, "-120"),
    "data_size_mb": _Key("data_size", _finite, lambda v: v * 8e6, "1"),
    "t_max_ms": _Key("t_max", _finite, lambda v: v * 1e-3, "55"),
    "gu_density_per_km2": _Key("gu_density", _finite, lambda v: v * 1e-6, "500"),
    "cn_density_per_km2": _Key("cn_density", _finite, lambda v: v * 1e-6, "5"),
    "compute_latency_model": _Key("compute_model", parse_model, lambda m: m, "deterministic:0.2"),
    "request_radius_m": _Key("request_radius", _finite, float, "200"),
    "cn_dist_radius_m": _Key("cn_dist_radius", _radius, float, "inf"),
    "env_b": _Key("env_b", _finite, float, "0.136"),
    "env_c": _Key("env_c", _finite, float, "11.95"),
    "env_b_down": _Key("env_b_down", _optional, lambda v: v, "same"),
    "env_c_down": _Key("env_c_down", _optional, lambda v: v, "same"),
    "uav_altitude_m": _Key("altitude", _finite, float, "200"),
    "channel_averaging": _Key("averaging", _mode, lambda v: v, "power_avg"),
}


def parse_text(text: str) -> dict[str, str]:
    """Split a config document into raw ``key -> value`` strings."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def from_raw(raw: Mapping[str, str]) -> ScenarioConfig:
    unknown = sorted(set(raw) - set(RAW_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    values: dict[str, object] = {}
    for key, spec in RAW_KEYS.items():
        text = str(raw.get(key, spec.default))
        if key == "pathloss_exp_down" and text.strip().lower() == "same":
            text = str(raw.get("pathloss_exp_up", RAW_KEYS["pathloss_exp_up"].default))
        try:
            values[spec.target] = spec.to_si(spec.parse(text))
        except ValueError as exc:
            raise ConfigError(f"{key} = {text!r}: {exc}") from None
    cfg = ScenarioConfig(**values)
    violations = validate(cfg)
    if violations:
        by_field = {spec.target: key for key, spec in RAW_KEYS.items()}
        lines = [f"{by_field.get(v.field, v.field)} ({v})" for v in violations]
        raise ConfigError("invalid configuration: " + "; ".join(lines))
    return cfg


def parse_overrides(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"override {item!r} must look like key=value")
        out[key.strip()] = value.strip()
    return out


def load_config(text: str = "", overrides: Mapping[str, str] | None = None) -> ScenarioConfig:
    """Parse a config document, apply ``overrides`` and normalize to SI.

    Missing keys take the parameter-table defaults.
    """
    raw = parse_text(text)
    raw.update(overrides or {})
    return from_raw(raw)


def load_config_file(path, overrides: Mapping[str, str] | None = None) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return load_config(text, overrides)


def to_raw(cfg: ScenarioConfig) -> dict[str, str]:
    """Inverse of :func:`from_raw`, used to record effective configs."""
    def g(v):
        return f"{v:.12g}"

    return {
        "tx_power_gu_dbw": g(linear_to_db(cfg.tx_power_gu)),
        "tx_power_uav_dbw": g(linear_to_db(cfg.tx_power_uav)),
        "pathloss_exp_up": g(cfg.alpha_up),
        "pathloss_exp_down": g(cfg.alpha_down),
        "nlos_attenuation_db": g(-linear_to_db(cfg.eta)),
        "bandwidth_mhz": g(cfg.bandwidth / 1e6),
        "noise_dbm": g(linear_to_db(cfg.noise_power * 1000.0)),
        "data_size_mb": g(cfg.data_size / 8e6),
        "t_max_ms": g(cfg.t_max * 1e3),
        "gu_density_per_km2": g(cfg.gu_density * 1e6),
        "cn_density_per_km2": g(cfg.cn_density * 1e6),
        "compute_latency_model": cfg.compute_model.to_tag(),
        "request_radius_m": g(cfg.request_radius),
        "cn_dist_radius_m": "inf" if math.isinf(cfg.cn_dist_radius) else g(cfg.cn_dist_radius),
        "env_b": g(cfg.env_b),
        "env_c": g(cfg.env_c),
        "env_b_down": "same" if cfg.env_b_down is None else g(cfg.env_b_down),
        "env_c_down": "same" if cfg.env_c_down is None else g(cfg.env_c_down),
        "uav_altitude_m": g(cfg.altitude),
        "channel_averaging": cfg.averaging,
    }


def dump_config(cfg: ScenarioConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in to_raw(cfg).items())


SCENARIO_FIELDS = tuple(f.name for f in fields(ScenarioConfig))
