import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cache import SeriesCache
from .config import QuadratureOrders, SystemConfig
from .numerics import ExponentialSeries, QuadratureTable, chebyshev_nodes, multinomial_power

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AnalyticContext:
    """Quadrature tables and series constants shared by the closed-form evaluators.

    ``radii`` are the disc abscissas R/2 (1 + psi_l) behind mu_l = 1 + radii^alpha;
    ``Psi`` sums to one.
    """

    cfg: SystemConfig
    psi_table: QuadratureTable
    phi_m_table: QuadratureTable
    theta_q_table: QuadratureTable
    phi_n_table: QuadratureTable
    xi_b_table: QuadratureTable
    radii: np.ndarray
    mu: np.ndarray
    Psi: np.ndarray
    cache: SeriesCache = field(default_factory=SeriesCache)

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "AnalyticContext":
        orders = cfg.quad_orders
        psi_table = chebyshev_nodes(orders.L)
        radii = cfg.R / 2.0 * (1.0 + psi_table.nodes)
        mu = 1.0 + radii**cfg.alpha
        # sums to one because chebyshev_nodes rescales its weights to sum to 2
        Psi = 0.5 * psi_table.weights * (1.0 + psi_table.nodes)
        logger.debug(f"Built analytic context for K={cfg.K}, R={cfg.R}, alpha={cfg.alpha}")
        return cls(
            cfg=cfg,
            psi_table=psi_table,
            phi_m_table=chebyshev_nodes(orders.M),
            theta_q_table=chebyshev_nodes(orders.Q),
            phi_n_table=chebyshev_nodes(orders.N),
            xi_b_table=chebyshev_nodes(orders.B),
            radii=radii,
            mu=mu,
            Psi=Psi,
        )

    @property
    def S_L(self) -> float:
        return float(np.dot(self.Psi, self.mu))

    @property
    def cdf_series(self) -> ExponentialSeries:
        return ExponentialSeries.from_gain_constants(self.Psi, self.mu)

    def cdf_power(self, M: int) -> ExponentialSeries:
        """Expanded series of F(x)**M."""
        return self.cache.get_or_compute(
            ("cdf_power", M), lambda: multinomial_power(self.cdf_series, M)
        )


@lru_cache(maxsize=32)
def _context_for_geometry(K: int, R: float, alpha: float, orders: QuadratureOrders) -> AnalyticContext:
    return AnalyticContext.from_config(SystemConfig(K=K, R=R, alpha=alpha, quad_orders=orders))


def context_for(cfg: SystemConfig) -> AnalyticContext:
    """Shared context for a geometry; transmit power and targets do not enter it."""
    return _context_for_geometry(cfg.K, cfg.R, cfg.alpha, cfg.quad_orders)
