"""Task completion probability for UAV-relayed computing power networks."""
__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    AnalysisResult,
    average_success_probability,
    evaluate_average,
    evaluate_point,
    qualified_intensity,
    success_probability,
)
from .compute import Deterministic, EmpiricalTable, Exponential, ShiftedExponential  # noqa: E402
from .montecarlo import Estimate, estimate_success  # noqa: E402
from .units import ConfigError, ScenarioConfig, load_config, load_config_file, validate  # noqa: E402

__all__ = [
    "AnalysisResult",
    "ConfigError",
    "Deterministic",
    "EmpiricalTable",
    "Estimate",
    "Exponential",
    "ScenarioConfig",
    "ShiftedExponential",
    "average_success_probability",
    "estimate_success",
    "evaluate_average",
    "evaluate_point",
    "load_config",
    "load_config_file",
    "qualified_intensity",
    "success_probability",
    "validate",
]
