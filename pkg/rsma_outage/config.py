import logging
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional

from .exceptions import ConfigurationError, InvalidParameterError
from .utils import dbm_to_linear, load_yaml, merge_dicts, rate_to_sinr
from .validation import validate_schema

logger = logging.getLogger(__name__)

DEFAULT_SCENARIO = os.path.join(os.path.dirname(__file__), "scenarios", "default.yaml")


@dataclass(frozen=True)
class QuadratureOrders:
    """Gauss-Chebyshev orders.

    L, M, Q, N, B are the tradeoff orders of the gain CDF and joint CDF;
    ``integration`` is used for the integrals of the CUS outage expressions and
    ``fallback`` for the cancellation-free GUS path.
    """

    L: int = 10
    M: int = 10
    Q: int = 10
    N: int = 10
    B: int = 10
    integration: int = 20
    fallback: int = 256

    def __post_init__(self):
        for name, value in asdict(self).items():
            if int(value) != value or value < 1:
                raise InvalidParameterError(f"quad_orders.{name}", f"must be an integer >= 1, got {value}")


@dataclass(frozen=True)
class TargetRates:
    """Target rates in bits/s/Hz of the primary, secondary, U_i and U_j roles."""

    rate_p: float = 1.0
    rate_s: float = 1.0
    rate_i: float = 1.0
    rate_j: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise InvalidParameterError(f"target_rates.{name}", f"must be >= 0, got {value}")


@dataclass(frozen=True)
class SystemConfig:
    K: int = 4
    R: float = 500.0
    alpha: float = 3.76
    noise_power_dbm: float = -100.0
    p_max_dbm: float = 20.0
    quad_orders: QuadratureOrders = field(default_factory=QuadratureOrders)
    target_rates: TargetRates = field(default_factory=TargetRates)

    def __post_init__(self):
        if self.K < 2:
            raise InvalidParameterError("K", f"at least two users are required, got {self.K}")
        if self.R <= 0:
            raise InvalidParameterError("R", f"disc radius must be positive, got {self.R}")
        if self.alpha <= 2:
            raise InvalidParameterError("alpha", f"path-loss exponent must exceed 2, got {self.alpha}")

    @property
    def rho_m(self) -> float:
        """Maximal transmit SNR shared by every user."""
        return self.transmit_snr(self.p_max_dbm)

    @property
    def R_alpha(self) -> float:
        return float(self.R**self.alpha)

    def transmit_snr(self, power_dbm: float) -> float:
        return float(dbm_to_linear(power_dbm) / dbm_to_linear(self.noise_power_dbm))

    def with_power(self, p_max_dbm: float) -> "SystemConfig":
        return replace(self, p_max_dbm=float(p_max_dbm))

    def with_targets(self, **rates: float) -> "SystemConfig":
        return replace(self, target_rates=replace(self.target_rates, **rates))

    def with_geometry(self, R: Optional[float] = None, alpha: Optional[float] = None, K: Optional[int] = None) -> "SystemConfig":
        changes: Dict[str, Any] = {}
        if R is not None:
            changes["R"] = float(R)
        if alpha is not None:
            changes["alpha"] = float(alpha)
        if K is not None:
            changes["K"] = int(K)
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def target_sinr(rate: float) -> float:
    return float(rate_to_sinr(rate))


def normalized_threshold(rate: float, rho: float) -> float:
    """tau = (2^R - 1) / rho"""
    return target_sinr(rate) / rho


@dataclass(frozen=True)
class SimulationSettings:
    trials: int = 1_000_000
    seed: int = 20240601
    block_size: int = 65536
    confidence_z: float = 1.96
    ergodic_metric: str = "secondary"

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError("trials", f"must be >= 1, got {self.trials}")
        if self.block_size < 1:
            raise InvalidParameterError("block_size", f"must be >= 1, got {self.block_size}")


@dataclass(frozen=True)
class ValidationThresholds:
    rel_tol: float = 0.05
    probability_floor: float = 1e-3
    half_widths: float = 3.0
    slope_tol: float = 0.3
    insufficient_below: float = 1e-4


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemConfig
    simulation: SimulationSettings
    validation: ValidationThresholds
    experiments: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    source: str = DEFAULT_SCENARIO


def _build_system(section: Dict[str, Any]) -> SystemConfig:
    section = dict(section)
    orders = QuadratureOrders(**section.pop("quad_orders", {}))
    targets = TargetRates(**section.pop("target_rates", {}))
    return SystemConfig(quad_orders=orders, target_rates=targets, **section)


def load_scenario(config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """
    Load the packaged defaults, merge a user scenario file and explicit overrides on
    top, validate the result and build the typed configuration.
    """
    data = load_yaml(DEFAULT_SCENARIO)
    if config_path:
        if not os.path.isfile(config_path):
            raise ConfigurationError(f"Scenario file not found: {config_path}")
        user = load_yaml(config_path)
        if not isinstance(user, dict):
            raise ConfigurationError(f"Scenario file {config_path} must contain a mapping")
        validate_schema(user)
        data = merge_dicts(data, user)
    if overrides:
        data = merge_dicts(data, overrides)
    validate_schema(data)
    logger.debug(f"Loaded scenario from {config_path or DEFAULT_SCENARIO}")
    return ScenarioConfig(
        system=_build_system(data.get("system", {})),
        simulation=SimulationSettings(**data.get("simulation", {})),
        validation=ValidationThresholds(**data.get("validation", {})),
        experiments=data.get("experiments", {}) or {},
        source=config_path or DEFAULT_SCENARIO,
    )
