"""
Uplink rate splitting for a scheduled pair.

U_i splits its message into s_i1 and s_i2 with power shares beta and 1 - beta; the
receiver decodes s_i1, then s_j, then s_i2. beta in {0, 1} collapses to one of the
two NOMA decoding orders. Every function broadcasts over numpy arrays so a whole
block of Monte Carlo slots is decided at once.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .exceptions import InvariantViolationError

logger = logging.getLogger(__name__)

BETA_TOL = 1e-9


class Strategy(str, Enum):
    CPA = "CPA"
    CPA_NOMA = "CPA_NOMA"
    FPA = "FPA"
    NOMA = "NOMA"
    OMA = "OMA"
    HYBRID = "HYBRID"


@dataclass(frozen=True, eq=False)
class TransmissionOutcome:
    """Decision for one slot or a block of slots.

    Under CPA ``first`` is the primary user and ``second`` the secondary; otherwise
    they are U_i and U_j. ``splitting_user`` is "first", "second" or "none".
    """

    beta: np.ndarray
    strategy: Strategy
    rate_first: np.ndarray
    rate_second: np.ndarray
    sinr_i1: np.ndarray
    sinr_j: np.ndarray
    sinr_i2: np.ndarray
    outage_first: np.ndarray
    outage_second: np.ndarray
    splitting_user: np.ndarray


def _arrays(*values):
    return np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in values))


def _outage(rate, gamma) -> np.ndarray:
    if gamma is None:
        return np.zeros(np.shape(rate), dtype=bool)
    return rate < np.log2(1.0 + np.asarray(gamma, dtype=float))


def sic_sinrs(eta_i, eta_j, beta) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SINRs of s_i1, s_j and s_i2 under the decoding order s_i1 -> s_j -> s_i2."""
    eta_i, eta_j, beta = _arrays(eta_i, eta_j, beta)
    residual = (1.0 - beta) * eta_i
    sinr_i1 = beta * eta_i / (residual + eta_j + 1.0)
    sinr_j = eta_j / (residual + 1.0)
    return sinr_i1, sinr_j, residual


def _check_beta(beta: np.ndarray, where: str):
    if np.any(beta < -BETA_TOL) or np.any(beta > 1.0 + BETA_TOL):
        raise InvariantViolationError(f"{where}: power split left [0, 1] (min {beta.min()}, max {beta.max()})")


def cpa_decide(eta_p, eta_s, gamma_p, gamma_s=None) -> TransmissionOutcome:
    """
    Cognitive power allocation: the primary's target SINR gamma_p is protected and
    the secondary (the splitting user) takes whatever rate remains.
    """
    eta_p, eta_s = _arrays(eta_p, eta_s)
    gamma_p = float(gamma_p)
    rate_target_p = np.log2(1.0 + gamma_p)

    primary_failed = eta_p < gamma_p
    primary_first = ~primary_failed & (eta_p / (eta_s + 1.0) >= gamma_p)
    split = ~primary_failed & ~primary_first

    safe_eta_s = np.where(split, eta_s, 1.0)
    beta_split = 1.0 - (eta_p - gamma_p) / (safe_eta_s * gamma_p)
    if np.any(split):
        _check_beta(beta_split[split], "cpa_decide")
    beta = np.clip(np.where(primary_failed, 1.0, np.where(primary_first, 0.0, beta_split)), 0.0, 1.0)

    rate_s = np.where(
        primary_failed,
        np.log2(1.0 + eta_s / (eta_p + 1.0)),
        np.where(primary_first, np.log2(1.0 + eta_s), np.log2(1.0 + eta_p + eta_s) - rate_target_p),
    )
    rate_p = np.where(
        primary_failed,
        np.log2(1.0 + eta_p),
        np.where(primary_first, np.log2(1.0 + eta_p / (eta_s + 1.0)), rate_target_p),
    )
    sinr_i1, sinr_j, sinr_i2 = sic_sinrs(eta_s, eta_p, beta)
    return TransmissionOutcome(
        beta=beta,
        strategy=Strategy.CPA,
        rate_first=rate_p,
        rate_second=np.maximum(rate_s, 0.0),
        sinr_i1=sinr_i1,
        sinr_j=sinr_j,
        sinr_i2=sinr_i2,
        outage_first=primary_failed,
        outage_second=_outage(rate_s, gamma_s),
        splitting_user=np.where(split, "second", "none"),
    )


def noma_cpa_baseline(eta_p, eta_s, gamma_p, gamma_s=None) -> TransmissionOutcome:
    """CPA restricted to beta in {0, 1}."""
    eta_p, eta_s = _arrays(eta_p, eta_s)
    gamma_p = float(gamma_p)
    primary_first = eta_p / (eta_s + 1.0) >= gamma_p
    beta = np.where(primary_first, 0.0, 1.0)
    rate_s = np.where(primary_first, np.log2(1.0 + eta_s), np.log2(1.0 + eta_s / (eta_p + 1.0)))
    rate_p = np.where(primary_first, np.log2(1.0 + eta_p / (eta_s + 1.0)), np.log2(1.0 + eta_p))
    sinr_i1, sinr_j, sinr_i2 = sic_sinrs(eta_s, eta_p, beta)
    return TransmissionOutcome(
        beta=beta,
        strategy=Strategy.CPA_NOMA,
        rate_first=rate_p,
        rate_second=rate_s,
        sinr_i1=sinr_i1,
        sinr_j=sinr_j,
        sinr_i2=sinr_i2,
        outage_first=eta_p < gamma_p,
        outage_second=_outage(rate_s, gamma_s),
        splitting_user=np.full(beta.shape, "none"),
    )


def fpa_decide(eta_i, eta_j, gamma_i=None, gamma_j=None) -> TransmissionOutcome:
    """
    Fairness-oriented power allocation. The user with the smaller effective SNR
    splits so that both land on the equal-rate point of the sum-capacity line; when
    the larger one already beats that point decoded first (a >= b + b^2), plain NOMA
    is used with the larger user decoded first.
    """
    eta_i, eta_j = _arrays(eta_i, eta_j)
    i_larger = eta_i >= eta_j
    a = np.where(i_larger, eta_i, eta_j)
    b = np.where(i_larger, eta_j, eta_i)

    noma = a >= b + b**2
    equal_rate = 0.5 * np.log2(1.0 + a + b)
    safe_b = np.where(noma, 1.0, b)
    root = np.sqrt(1.0 + a + b) - 1.0
    safe_root = np.where(noma, 1.0, root)
    beta_split = 1.0 - (a / safe_root - 1.0) / safe_b
    if np.any(~noma):
        _check_beta(beta_split[~noma], "fpa_decide")
    beta = np.clip(np.where(noma, 0.0, beta_split), 0.0, 1.0)

    rate_larger = np.where(noma, np.log2(1.0 + a / (b + 1.0)), equal_rate)
    rate_smaller = np.where(noma, np.log2(1.0 + b), equal_rate)
    sinr_i1, sinr_j, sinr_i2 = sic_sinrs(b, a, beta)
    return TransmissionOutcome(
        beta=beta,
        strategy=Strategy.FPA,
        rate_first=np.where(i_larger, rate_larger, rate_smaller),
        rate_second=np.where(i_larger, rate_smaller, rate_larger),
        sinr_i1=sinr_i1,
        sinr_j=sinr_j,
        sinr_i2=sinr_i2,
        outage_first=_outage(np.where(i_larger, rate_larger, rate_smaller), gamma_i),
        outage_second=_outage(np.where(i_larger, rate_smaller, rate_larger), gamma_j),
        splitting_user=np.where(noma, "none", np.where(i_larger, "second", "first")),
    )


def noma_fairness_baseline(eta_i, eta_j, gamma_i=None, gamma_j=None) -> TransmissionOutcome:
    """NOMA with the stronger user decoded first."""
    eta_i, eta_j = _arrays(eta_i, eta_j)
    i_larger = eta_i >= eta_j
    strong = np.where(i_larger, eta_i, eta_j)
    weak = np.where(i_larger, eta_j, eta_i)
    rate_strong = np.log2(1.0 + strong / (weak + 1.0))
    rate_weak = np.log2(1.0 + weak)
    rate_first = np.where(i_larger, rate_strong, rate_weak)
    rate_second = np.where(i_larger, rate_weak, rate_strong)
    beta = np.zeros(eta_i.shape)
    sinr_i1, sinr_j, sinr_i2 = sic_sinrs(weak, strong, beta)
    return TransmissionOutcome(
        beta=beta,
        strategy=Strategy.NOMA,
        rate_first=rate_first,
        rate_second=rate_second,
        sinr_i1=sinr_i1,
        sinr_j=sinr_j,
        sinr_i2=sinr_i2,
        outage_first=_outage(rate_first, gamma_i),
        outage_second=_outage(rate_second, gamma_j),
        splitting_user=np.full(beta.shape, "none"),
    )


def oma_baseline(eta_i, eta_j, gamma_i=None, gamma_j=None) -> TransmissionOutcome:
    """Time sharing with t_k = eta_k / (eta_i + eta_j); no SIC, so the SINR fields are 0."""
    eta_i, eta_j = _arrays(eta_i, eta_j)
    total = eta_i + eta_j
    safe_total = np.where(total > 0, total, 1.0)
    sum_rate = np.log2(1.0 + total)
    rate_first = np.where(total > 0, eta_i / safe_total * sum_rate, 0.0)
    rate_second = np.where(total > 0, eta_j / safe_total * sum_rate, 0.0)
    zeros = np.zeros(eta_i.shape)
    return TransmissionOutcome(
        beta=zeros,
        strategy=Strategy.OMA,
        rate_first=rate_first,
        rate_second=rate_second,
        sinr_i1=zeros,
        sinr_j=zeros,
        sinr_i2=zeros,
        outage_first=_outage(rate_first, gamma_i),
        outage_second=_outage(rate_second, gamma_j),
        splitting_user=np.full(eta_i.shape, "none"),
    )


def jain_index(rate_a, rate_b):
    """(sum R)^2 / (2 sum R^2) for a pair; 1 when both rates are zero."""
    rate_a = np.asarray(rate_a, dtype=float)
    rate_b = np.asarray(rate_b, dtype=float)
    denominator = 2.0 * (rate_a**2 + rate_b**2)
    safe = np.where(denominator > 0, denominator, 1.0)
    value = np.where(denominator > 0, (rate_a + rate_b) ** 2 / safe, 1.0)
    return float(value) if value.ndim == 0 else value


def hybrid_baseline(eta_i, eta_j, gamma_i=None, gamma_j=None) -> TransmissionOutcome:
    """Per slot, the fairer of strong-first NOMA and OMA; ties go to OMA."""
    noma = noma_fairness_baseline(eta_i, eta_j, gamma_i, gamma_j)
    oma = oma_baseline(eta_i, eta_j, gamma_i, gamma_j)
    pick_noma = np.asarray(jain_index(noma.rate_first, noma.rate_second)) > np.asarray(
        jain_index(oma.rate_first, oma.rate_second)
    )

    def choose(field: str):
        return np.where(pick_noma, getattr(noma, field), getattr(oma, field))

    return TransmissionOutcome(
        beta=choose("beta"),
        strategy=Strategy.HYBRID,
        rate_first=choose("rate_first"),
        rate_second=choose("rate_second"),
        sinr_i1=choose("sinr_i1"),
        sinr_j=choose("sinr_j"),
        sinr_i2=choose("sinr_i2"),
        outage_first=choose("outage_first"),
        outage_second=choose("outage_second"),
        splitting_user=choose("splitting_user"),
    )


def decide(strategy: Strategy, eta_first, eta_second, gamma_first: float, gamma_second: Optional[float]) -> TransmissionOutcome:
    """Dispatch on the strategy; CPA roles read (primary, secondary)."""
    strategy = Strategy(strategy)
    if strategy is Strategy.CPA:
        return cpa_decide(eta_first, eta_second, gamma_first, gamma_second)
    if strategy is Strategy.CPA_NOMA:
        return noma_cpa_baseline(eta_first, eta_second, gamma_first, gamma_second)
    if strategy is Strategy.FPA:
        return fpa_decide(eta_first, eta_second, gamma_first, gamma_second)
    if strategy is Strategy.NOMA:
        return noma_fairness_baseline(eta_first, eta_second, gamma_first, gamma_second)
    if strategy is Strategy.OMA:
        return oma_baseline(eta_first, eta_second, gamma_first, gamma_second)
    return hybrid_baseline(eta_first, eta_second, gamma_first, gamma_second)
