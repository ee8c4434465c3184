"""scikit-learn style facade over the analytical engine.

Hyperparameters are scenario overrides in SI units; ``predict`` maps GU
distances from the UAV (one feature, metres) to per-GU completion
probability, and ``score`` returns the GU-averaged probability.  Being a
``BaseEstimator`` gives ``get_params``/``set_params``/``clone``, so
scenarios compose with ``ParameterGrid`` and friends.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import evaluate_average, evaluate_point
from .units import ScenarioConfig, validate

_OVERRIDES = ("altitude", "cn_density", "cn_dist_radius", "t_max", "compute_model", "averaging")


class TaskCompletionEstimator(TransformerMixin, BaseEstimator):
    def __init__(self, base_config=None, altitude=None, cn_density=None, cn_dist_radius=None,
                 t_max=None, compute_model=None, averaging=None):
        self.base_config = base_config
        self.altitude = altitude
        self.cn_density = cn_density
        self.cn_dist_radius = cn_dist_radius
        self.t_max = t_max
        self.compute_model = compute_model
        self.averaging = averaging

    def scenario(self) -> ScenarioConfig:
        cfg = self.base_config if self.base_config is not None else ScenarioConfig()
        changes = {k: getattr(self, k) for k in _OVERRIDES if getattr(self, k) is not None}
        return cfg.replace(**changes)

    def fit(self, X=None, y=None):
        """Validate the scenario and evaluate the averaged probability.  ``X``/``y`` are ignored."""
        cfg = self.scenario()
        problems = validate(cfg)
        if problems:
            raise ValueError("invalid scenario: " + "; ".join(map(str, problems)))
        self.config_ = cfg
        self.average_ = evaluate_average(cfg)
        self.n_features_in_ = 1
        return self

    def _distances(self, X):
        check_is_fitted(self, "config_")
        X = check_array(X, ensure_all_finite=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected one feature (GU distance in metres), got {X.shape[1]}")
        if np.any(X < 0):
            raise ValueError("GU distances must be nonnegative")
        return X[:, 0]

    def predict(self, X) -> np.ndarray:
        """Per-GU task completion probability at each distance in ``X``."""
        return np.array([evaluate_point(float(r), self.config_).success_prob for r in self._distances(X)])

    def transform(self, X) -> np.ndarray:
        """Columns: qualified-CN intensity, service radius (m), uplink latency (s)."""
        rows = [evaluate_point(float(r), self.config_) for r in self._distances(X)]
        return np.array([[p.lambda_intensity, p.service_radius, p.t1] for p in rows])

    def score(self, X=None, y=None) -> float:
        check_is_fitted(self, "config_")
        return self.average_.success_prob
