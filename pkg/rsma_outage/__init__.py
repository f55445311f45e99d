from .config import ScenarioConfig, SimulationSettings, SystemConfig, ValidationThresholds, load_scenario
from .context import AnalyticContext, context_for
from .exceptions import (
    AnalyticDispatchError,
    ConfigurationError,
    ExperimentNotFoundError,
    InvalidParameterError,
    InvariantViolationError,
    RsmaOutageException,
    SchemaValidationError,
    ValidationError,
)
from .joint_cdf import joint_cdf, joint_cdf_dx, joint_cdf_dy, marginal_cdf_first, marginal_cdf_second
from .montecarlo import estimate_admission, estimate_ergodic_rate, estimate_fairness, estimate_outage
from .outage import (
    diversity_slope,
    outage_cpa_cus,
    outage_cpa_cus_bound,
    outage_cpa_gus,
    outage_cpa_gus_highsnr,
    outage_fpa_cus,
    outage_fpa_cus_bound,
    outage_fpa_gus,
    outage_fpa_gus_highsnr,
)
from .power_alloc import Strategy
from .scheduling import Scheme

__all__ = [
    "AnalyticContext",
    "AnalyticDispatchError",
    "ConfigurationError",
    "ExperimentNotFoundError",
    "InvalidParameterError",
    "InvariantViolationError",
    "RsmaOutageException",
    "ScenarioConfig",
    "SchemaValidationError",
    "Scheme",
    "SimulationSettings",
    "Strategy",
    "SystemConfig",
    "ValidationError",
    "ValidationThresholds",
    "context_for",
    "diversity_slope",
    "estimate_admission",
    "estimate_ergodic_rate",
    "estimate_fairness",
    "estimate_outage",
    "joint_cdf",
    "joint_cdf_dx",
    "joint_cdf_dy",
    "load_scenario",
    "marginal_cdf_first",
    "marginal_cdf_second",
    "outage_cpa_cus",
    "outage_cpa_cus_bound",
    "outage_cpa_gus",
    "outage_cpa_gus_highsnr",
    "outage_fpa_cus",
    "outage_fpa_cus_bound",
    "outage_fpa_gus",
    "outage_fpa_gus_highsnr",
]

__version__ = "0.1.0"
