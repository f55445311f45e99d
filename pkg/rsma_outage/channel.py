"""
Users uniformly dropped on a disc around the base station with Rayleigh fading and
bounded path loss: |h_k|^2 = |iota_k|^2 / (1 + r_k^alpha).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import SystemConfig
from .context import AnalyticContext
from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


def _as_output(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Distances, gains and per-user CDF values; the last axis indexes users.

    A single slot has shape (K,), a batch of slots (n, K).
    """

    distances: np.ndarray
    gains: np.ndarray
    cdf_values: np.ndarray

    @property
    def K(self) -> int:
        return int(self.gains.shape[-1])

    @property
    def is_batch(self) -> bool:
        return self.gains.ndim == 2


def realization_from_fading(distances, fading, alpha: float) -> ChannelRealization:
    distances = np.asarray(distances, dtype=float)
    path_loss = 1.0 + distances**alpha
    gains = np.asarray(fading, dtype=float) / path_loss
    cdf_values = -np.expm1(-path_loss * gains)
    return ChannelRealization(distances=distances, gains=gains, cdf_values=cdf_values)


def sample_realization(
    cfg: SystemConfig,
    rng: np.random.Generator,
    size: Optional[int] = None,
    distances: Optional[Sequence[float]] = None,
) -> ChannelRealization:
    """
    Draw one slot (or ``size`` slots) of user distances and fading gains.

    Fixed ``distances`` bypass the position draw.
    """
    shape = (cfg.K,) if size is None else (int(size), cfg.K)
    if distances is None:
        radii = cfg.R * np.sqrt(rng.random(shape))
    else:
        fixed = np.asarray(distances, dtype=float)
        if fixed.shape != (cfg.K,):
            raise InvalidParameterError("distances", f"expected {cfg.K} distances, got {fixed.size}")
        if np.any(fixed < 0) or np.any(fixed > cfg.R):
            raise InvalidParameterError("distances", f"must lie in [0, {cfg.R}]")
        radii = np.broadcast_to(fixed, shape).copy()
    fading = rng.exponential(1.0, shape)
    return realization_from_fading(radii, fading, cfg.alpha)


def conditional_gain_cdf(x, r, alpha: float):
    """1 - exp(-(1 + r^alpha) x), the gain CDF of a user at distance r."""
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    return _as_output(-np.expm1(-(1.0 + np.asarray(r, dtype=float) ** alpha) * x))


def gain_cdf_powers(x, ctx: AnalyticContext, power: int):
    """
    sum_l Psi_l (1 - exp(-mu_l x))^power: the disc average of the conditional CDF
    raised to ``power``.
    """
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    conditional = -np.expm1(-np.multiply.outer(x, ctx.mu))
    return _as_output(conditional**power @ ctx.Psi)


def unordered_gain_cdf(x, ctx: AnalyticContext):
    return _as_output(np.clip(gain_cdf_powers(x, ctx, 1), 0.0, 1.0))


def unordered_gain_pdf(x, ctx: AnalyticContext):
    x = np.asarray(x, dtype=float)
    density = np.exp(-np.multiply.outer(np.maximum(x, 0.0), ctx.mu)) @ (ctx.Psi * ctx.mu)
    return _as_output(np.where(x < 0, 0.0, density))


def largest_gain_cdf(x, ctx: AnalyticContext):
    """CDF of the largest of K i.i.d. unordered gains."""
    return _as_output(np.asarray(unordered_gain_cdf(x, ctx)) ** ctx.cfg.K)


def second_largest_gain_cdf(x, ctx: AnalyticContext):
    """CDF of the second largest of K i.i.d. unordered gains."""
    K = ctx.cfg.K
    F = np.asarray(unordered_gain_cdf(x, ctx))
    return _as_output(np.clip(F ** (K - 1) * (K - (K - 1) * F), 0.0, 1.0))
