import math

import numpy as np
import pytest

from uavcpn.compute import (
    Deterministic, EmpiricalTable, Exponential, ShiftedExponential, latency_cdf, parse_model, sample_latency,
)

MODELS = [
    Deterministic(2e-4),
    Exponential(2e-3),
    ShiftedExponential(1e-4, 1.9e-3),
    EmpiricalTable((1e-4, 5e-4, 2e-3), (0.2, 0.7, 1.0)),
]
IDS = ["deterministic", "exponential", "shifted", "empirical"]
KS_CRIT_001 = 1.62762  # asymptotic Kolmogorov quantile at alpha = 0.01


def ks_distance(samples, model):
    """sup |F_n - F| checked at every sample value from both sides (valid for step CDFs too)."""
    x = np.unique(samples)
    s = np.sort(samples)
    n = s.size
    fn_right = np.searchsorted(s, x, side="right") / n
    fn_left = np.searchsorted(s, x, side="left") / n
    f_right = model.cdf(x)
    f_left = model.cdf(np.nextafter(x, -np.inf))
    return max(np.max(np.abs(fn_right - f_right)), np.max(np.abs(fn_left - f_left)))


def test_deterministic_cdf_examples():
    m = Deterministic(2e-4)
    assert latency_cdf(m, 3e-4, 8e6) == 1.0
    assert latency_cdf(m, 2e-4, 8e6) == 1.0  # closed inequality at the atom
    assert latency_cdf(m, 1.999e-4, 8e6) == 0.0


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_negative_time_has_zero_probability(model):
    assert latency_cdf(model, -1e-3, 8e6) == 0.0
    assert latency_cdf(model, np.nextafter(0.0, -1.0), 8e6) == 0.0
    assert latency_cdf(model, math.inf, 8e6) == 1.0


def test_exponential_cdf_at_mean():
    assert latency_cdf(Exponential(2e-3), 2e-3, 8e6) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert 1 - math.exp(-1) == pytest.approx(0.6321, abs=1e-4)


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_cdf_monotone(model):
    t = np.linspace(-1e-3, 1e-2, 1000)
    assert np.all(np.diff(model.cdf(t)) >= 0)
    assert np.all((model.cdf(t) >= 0) & (model.cdf(t) <= 1))


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_sampler_matches_cdf(model):
    n = 100_000
    samples = sample_latency(model, np.random.default_rng(7), 8e6, size=n)
    assert ks_distance(samples, model) < KS_CRIT_001 / math.sqrt(n)


def test_deterministic_samples_constant():
    s = sample_latency(Deterministic(2e-4), np.random.default_rng(0), 8e6, size=1000)
    assert np.all(s == 2e-4)


def test_exponential_sample_mean_within_3_sigma():
    n, mean = 100_000, 2e-3
    s = sample_latency(Exponential(mean), np.random.default_rng(3), 8e6, size=n)
    assert abs(s.mean() - mean) < 3 * mean / math.sqrt(n)


def test_shifted_exponential_support():
    s = sample_latency(ShiftedExponential(1e-4, 1.9e-3), np.random.default_rng(1), 8e6, size=10_000)
    assert s.min() >= 1e-4


def test_empirical_workload_scaling():
    m = EmpiricalTable((1e-3, 2e-3), (0.5, 1.0), reference_workload=8e6)
    assert m.cdf(1e-3, 8e6) == 0.5
    assert m.cdf(1e-3, 16e6) == 0.0
    assert m.cdf(2e-3, 16e6) == 0.5
    assert EmpiricalTable((1e-3,), (1.0,)).cdf(1e-3, 123.0) == 1.0


@pytest.mark.parametrize("lat,cum", [((2e-3, 1e-3), (0.5, 1.0)), ((1e-3, 2e-3), (0.6, 0.5)),
                                     ((1e-3, 2e-3), (0.5, 0.9)), ((-1e-3,), (1.0,))])
def test_empirical_invariants(lat, cum):
    with pytest.raises(ValueError):
        EmpiricalTable(lat, cum)


@pytest.mark.parametrize("ctor", [lambda: Deterministic(0.0), lambda: Exponential(-1.0),
                                  lambda: ShiftedExponential(-1e-3, 1e-3), lambda: ShiftedExponential(0.0, 0.0)])
def test_parameter_invariants(ctor):
    with pytest.raises(ValueError):
        ctor()


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_tag_round_trip(model):
    again = parse_model(model.to_tag())
    assert type(again) is type(model)
    assert again.mean() == pytest.approx(model.mean(), rel=1e-12)


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_with_mean(model):
    assert model.with_mean(3e-3).mean() == pytest.approx(3e-3, rel=1e-12)


@pytest.mark.parametrize("text", ["deterministic", "deterministic:", "weibull:1", "shifted_exponential:1",
                                  "empirical:1,2", "exponential:abc"])
def test_bad_tags(text):
    with pytest.raises(ValueError):
        parse_model(text)
