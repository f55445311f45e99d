"""
Monte Carlo trial engine.

Trials run in fixed-size blocks. Block b draws from its own Philox stream keyed by
(seed, b), so the numbers a trial sees depend only on the seed and its position,
and block statistics are reduced in block order whatever the worker count. Every
strategy of a run is decided on the same channel draws.
"""

import logging
import math
import os
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .channel import sample_realization
from .config import SimulationSettings, SystemConfig, target_sinr
from .exceptions import ConfigurationError, InvalidParameterError, InvariantViolationError
from .power_alloc import Strategy, TransmissionOutcome, decide, jain_index
from .scheduling import Scheme, admission_histogram, select_pair
from .utils import fingerprint

logger = logging.getLogger(__name__)

WORKERS_ENV = "RSMA_OUTAGE_WORKERS"
CPA_STRATEGIES = (Strategy.CPA, Strategy.CPA_NOMA)
FAIRNESS_STRATEGIES = (Strategy.FPA, Strategy.NOMA, Strategy.OMA, Strategy.HYBRID)
ERGODIC_METRICS = ("secondary", "sum", "first", "second")
SPOT_CHECK_EVERY = 100
RATE_TOL = 1e-9


@dataclass(frozen=True)
class EstimateResult:
    metric: str
    estimate: float
    trials: int
    half_width: Optional[float]
    seed: int
    fingerprint: str
    role: str = ""
    insufficient: bool = False


@dataclass(frozen=True, eq=False)
class RateDistribution:
    """Empirical CDF of the per-user rates: ``levels[k]`` is the ``quantiles[k]`` quantile."""

    levels: np.ndarray
    quantiles: np.ndarray
    p10: float


@dataclass(frozen=True, eq=False)
class FairnessResult:
    jain: EstimateResult
    rates: RateDistribution


@dataclass(frozen=True)
class TrialPlan:
    """Everything a worker needs to simulate one block."""

    cfg: SystemConfig
    scheme: Scheme
    strategies: Tuple[Strategy, ...]
    rho_m: float
    trials: int
    seed: int
    block_size: int = 65536
    distances: Optional[Tuple[float, ...]] = None
    cpa_primary: str = "first"
    fixed_snr: Optional[Tuple[float, float]] = None
    keep_rates: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError("trials", f"must be >= 1, got {self.trials}")
        if self.block_size < 1:
            raise InvalidParameterError("block_size", f"must be >= 1, got {self.block_size}")
        if self.cpa_primary not in ("first", "second"):
            raise InvalidParameterError("cpa_primary", f"expected 'first' or 'second', got {self.cpa_primary!r}")

    @property
    def blocks(self) -> int:
        return math.ceil(self.trials / self.block_size)

    def block_trials(self, index: int) -> int:
        return min(self.block_size, self.trials - index * self.block_size)

    def targets(self, strategy: Strategy) -> Tuple[float, float]:
        rates = self.cfg.target_rates
        if strategy in CPA_STRATEGIES:
            return target_sinr(rates.rate_p), target_sinr(rates.rate_s)
        return target_sinr(rates.rate_i), target_sinr(rates.rate_j)


def block_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    if workers < 1:
        raise ConfigurationError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


def _spot_check(outcome: TransmissionOutcome, eta_first: np.ndarray, eta_second: np.ndarray):
    sample = slice(None, None, SPOT_CHECK_EVERY)
    rates = np.stack((outcome.rate_first[sample], outcome.rate_second[sample]))
    if not np.all(np.isfinite(rates)) or np.any(rates < -RATE_TOL):
        raise InvariantViolationError(f"{outcome.strategy.value}: rates must be finite and non-negative")
    capacity = np.log2(1.0 + eta_first[sample] + eta_second[sample])
    if np.any(rates.sum(axis=0) > capacity + RATE_TOL):
        raise InvariantViolationError(f"{outcome.strategy.value}: sum rate exceeds the sum capacity")


def _simulate_block(plan: TrialPlan, index: int) -> Dict[str, np.ndarray]:
    rng = block_rng(plan.seed, index)
    n = plan.block_trials(index)
    stats: Dict[str, np.ndarray] = {}
    if plan.fixed_snr is None:
        realization = sample_realization(plan.cfg, rng, size=n, distances=plan.distances)
        pair = select_pair(realization, plan.scheme, rng)
        stats["admitted"] = admission_histogram(pair, plan.cfg.K) * n
        eta_first = plan.rho_m * pair.gain_first
        eta_second = plan.rho_m * pair.gain_second
    else:
        eta_first = np.full(n, float(plan.fixed_snr[0]))
        eta_second = np.full(n, float(plan.fixed_snr[1]))

    for strategy in plan.strategies:
        gamma_first, gamma_second = plan.targets(strategy)
        a, b = eta_first, eta_second
        if strategy in CPA_STRATEGIES and plan.cpa_primary == "second":
            a, b = eta_second, eta_first
        outcome = decide(strategy, a, b, gamma_first, gamma_second)
        _spot_check(outcome, a, b)
        total = outcome.rate_first + outcome.rate_second
        jain = np.asarray(jain_index(outcome.rate_first, outcome.rate_second))
        key = strategy.value
        stats[f"{key}/outage_first"] = np.count_nonzero(outcome.outage_first)
        stats[f"{key}/outage_second"] = np.count_nonzero(outcome.outage_second)
        for name, values in (("first", outcome.rate_first), ("second", outcome.rate_second), ("sum", total), ("jain", jain)):
            stats[f"{key}/{name}"] = np.sum(values)
            stats[f"{key}/{name}_sq"] = np.sum(values**2)
        if plan.keep_rates:
            stats[f"{key}/samples"] = np.concatenate((outcome.rate_first, outcome.rate_second))
    return stats


def run_plan(plan: TrialPlan, workers: Optional[int] = None) -> Dict[str, np.ndarray]:
    """Simulate every block and reduce the statistics in block order."""
    workers = worker_count() if workers is None else workers
    jobs = [(plan, index) for index in range(plan.blocks)]
    logger.debug(f"Running {plan.trials} trials in {plan.blocks} blocks on {workers} worker(s)")
    if workers > 1 and plan.blocks > 1:
        with Pool(min(workers, plan.blocks)) as pool:
            results = pool.starmap(_simulate_block, jobs)
    else:
        results = [_simulate_block(*job) for job in jobs]

    reduced: Dict[str, np.ndarray] = {}
    for stats in results:
        for key, value in stats.items():
            if key.endswith("/samples"):
                reduced.setdefault(key, []).append(value)
            elif key in reduced:
                reduced[key] = reduced[key] + value
            else:
                reduced[key] = value
    for key in [key for key in reduced if key.endswith("/samples")]:
        reduced[key] = np.concatenate(reduced[key])
    return reduced


def _fingerprint(plan: TrialPlan, strategy: Optional[Strategy] = None) -> str:
    return fingerprint(
        {
            "system": plan.cfg.to_dict(),
            "scheme": plan.scheme.value,
            "strategy": strategy.value if strategy else None,
            "rho_m": plan.rho_m,
            "distances": plan.distances,
            "cpa_primary": plan.cpa_primary,
        }
    )


def _proportion(
    metric: str, count: float, plan: TrialPlan, role: str, settings: SimulationSettings, insufficient_below: float, fingerprint_key: str
) -> EstimateResult:
    p = float(count) / plan.trials
    insufficient = p < insufficient_below
    half_width = None if insufficient else settings.confidence_z * math.sqrt(p * (1.0 - p) / plan.trials)
    return EstimateResult(
        metric=metric,
        estimate=p,
        trials=plan.trials,
        half_width=half_width,
        seed=plan.seed,
        fingerprint=fingerprint_key,
        role=role,
        insufficient=insufficient,
    )


def _mean(metric: str, total: float, total_sq: float, plan: TrialPlan, role: str, settings: SimulationSettings, fingerprint_key: str) -> EstimateResult:
    n = plan.trials
    mean = float(total) / n
    variance = max(float(total_sq) / n - mean**2, 0.0)
    half_width = settings.confidence_z * math.sqrt(variance / n) if n > 1 else None
    return EstimateResult(metric, mean, n, half_width, plan.seed, fingerprint_key, role)


def _plan(
    cfg: SystemConfig,
    scheme: Union[Scheme, str],
    strategies: Sequence[Union[Strategy, str]],
    rho_m: Optional[float],
    trials: Optional[int],
    seed: Optional[int],
    settings: SimulationSettings,
    **options,
) -> TrialPlan:
    distances = options.pop("distances", None)
    fixed_snr = options.pop("fixed_snr", None)
    return TrialPlan(
        cfg=cfg,
        scheme=Scheme(scheme),
        strategies=tuple(Strategy(strategy) for strategy in strategies),
        rho_m=cfg.rho_m if rho_m is None else float(rho_m),
        trials=settings.trials if trials is None else int(trials),
        seed=settings.seed if seed is None else int(seed),
        block_size=settings.block_size,
        distances=None if distances is None else tuple(float(d) for d in distances),
        fixed_snr=None if fixed_snr is None else (float(fixed_snr[0]), float(fixed_snr[1])),
        **options,
    )


def _roles(strategy: Strategy) -> Tuple[str, str]:
    return ("primary", "secondary") if strategy in CPA_STRATEGIES else ("first", "second")


def estimate_outage(
    cfg: SystemConfig,
    scheme: Union[Scheme, str],
    strategy: Union[Strategy, str],
    rho_m: Optional[float] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[SimulationSettings] = None,
    insufficient_below: float = 1e-4,
    cpa_primary: str = "first",
    fixed_snr: Optional[Tuple[float, float]] = None,
    workers: Optional[int] = None,
) -> Dict[str, EstimateResult]:
    """
    Outage frequency per role: ``primary``/``secondary`` under CPA, ``first``/
    ``second`` (U_i/U_j) otherwise.
    """
    settings = settings or SimulationSettings()
    strategy = Strategy(strategy)
    plan = _plan(cfg, scheme, [strategy], rho_m, trials, seed, settings, cpa_primary=cpa_primary, fixed_snr=fixed_snr)
    stats = run_plan(plan, workers)
    key = _fingerprint(plan, strategy)
    first, second = _roles(strategy)
    return {
        first: _proportion("outage", stats[f"{strategy.value}/outage_first"], plan, first, settings, insufficient_below, key),
        second: _proportion("outage", stats[f"{strategy.value}/outage_second"], plan, second, settings, insufficient_below, key),
    }


def estimate_ergodic_rate(
    cfg: SystemConfig,
    scheme: Union[Scheme, str],
    strategy: Union[Strategy, str],
    rho_m: Optional[float] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[SimulationSettings] = None,
    metric: Optional[str] = None,
    cpa_primary: str = "first",
    fixed_snr: Optional[Tuple[float, float]] = None,
    workers: Optional[int] = None,
) -> EstimateResult:
    """Mean achievable rate; ``metric`` picks the secondary/second user's rate, the first's or the sum."""
    settings = settings or SimulationSettings()
    metric = metric or settings.ergodic_metric
    if metric not in ERGODIC_METRICS:
        raise InvalidParameterError("metric", f"expected one of {', '.join(ERGODIC_METRICS)}, got {metric!r}")
    strategy = Strategy(strategy)
    plan = _plan(cfg, scheme, [strategy], rho_m, trials, seed, settings, cpa_primary=cpa_primary, fixed_snr=fixed_snr)
    stats = run_plan(plan, workers)
    column = "second" if metric == "secondary" else metric
    return _mean(
        f"ergodic_rate_{metric}",
        stats[f"{strategy.value}/{column}"],
        stats[f"{strategy.value}/{column}_sq"],
        plan,
        metric,
        settings,
        _fingerprint(plan, strategy),
    )


def estimate_fairness(
    cfg: SystemConfig,
    scheme: Union[Scheme, str],
    strategies: Sequence[Union[Strategy, str]] = FAIRNESS_STRATEGIES,
    rho_m: Optional[float] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[SimulationSettings] = None,
    quantile_points: int = 101,
    workers: Optional[int] = None,
) -> Dict[Strategy, FairnessResult]:
    """Mean Jain index and per-user rate CDF of each strategy on common channel draws."""
    settings = settings or SimulationSettings()
    plan = _plan(cfg, scheme, strategies, rho_m, trials, seed, settings, keep_rates=True)
    stats = run_plan(plan, workers)
    quantiles = np.linspace(0.0, 1.0, quantile_points)
    results = {}
    for strategy in plan.strategies:
        key = strategy.value
        samples = stats[f"{key}/samples"]
        results[strategy] = FairnessResult(
            jain=_mean("jain_index", stats[f"{key}/jain"], stats[f"{key}/jain_sq"], plan, key, settings, _fingerprint(plan, strategy)),
            rates=RateDistribution(
                levels=np.quantile(samples, quantiles),
                quantiles=quantiles,
                p10=float(np.quantile(samples, 0.1)),
            ),
        )
    return results


def estimate_admission(
    cfg: SystemConfig,
    scheme: Union[Scheme, str],
    fixed_distances: Optional[Sequence[float]] = None,
    rho_m: Optional[float] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[SimulationSettings] = None,
    workers: Optional[int] = None,
) -> List[EstimateResult]:
    """Frequency with which each user is scheduled; the frequencies sum to 2."""
    settings = settings or SimulationSettings()
    if fixed_distances is not None and len(fixed_distances) != cfg.K:
        raise InvalidParameterError("fixed_distances", f"expected {cfg.K} distances, got {len(fixed_distances)}")
    plan = _plan(cfg, scheme, [], rho_m, trials, seed, settings, distances=fixed_distances)
    stats = run_plan(plan, workers)
    counts = np.rint(stats["admitted"])
    key = _fingerprint(plan)
    return [
        _proportion("admission", counts[user], plan, f"user{user}", settings, 0.0, key)
        for user in range(cfg.K)
    ]


def sample_scheduled_gains(
    cfg: SystemConfig,
    scheme: Union[Scheme, str],
    trials: int,
    seed: int,
    block_size: int = 65536,
) -> Tuple[np.ndarray, np.ndarray]:
    """Gains of the first- and second-ranked scheduled users, on the same block streams as the estimators."""
    plan = TrialPlan(cfg=cfg, scheme=Scheme(scheme), strategies=(), rho_m=cfg.rho_m, trials=trials, seed=seed, block_size=block_size)
    firsts, seconds = [], []
    for index in range(plan.blocks):
        rng = block_rng(seed, index)
        realization = sample_realization(cfg, rng, size=plan.block_trials(index))
        pair = select_pair(realization, plan.scheme, rng)
        firsts.append(pair.gain_first)
        seconds.append(pair.gain_second)
    return np.concatenate(firsts), np.concatenate(seconds)
