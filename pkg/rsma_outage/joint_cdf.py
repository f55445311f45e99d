"""
Joint CDF of the gains of the two CDF-scheduled users.

X is the gain of the user with the largest CDF value and Y that of the runner-up.
The (x, y) plane splits into four regions along the lines y = x and
x = (R^alpha + 1) y, y = (R^alpha + 1) x; inside each region the CDF is a nested
Gauss-Chebyshev sum over user distances. The integration limits a1, a2 and the
inner limit I1(z) move with (x, y).

Partial derivatives differentiate that same dispatched expression, node movement
included. The expression is analytic in each argument inside a region, so it is
evaluated once with a complex perturbation of the argument and the derivative is
read off the imaginary part (complex step); the result is exact to rounding.
"""

import logging
from enum import IntEnum
from typing import Callable

import numpy as np

from .context import AnalyticContext
from .numerics import QuadratureTable
from .utils import clamp_probability

logger = logging.getLogger(__name__)

COMPLEX_STEP = 1e-20


class JointCdfCase(IntEnum):
    FAR_ABOVE = 1  # x >= (R^a + 1) y
    ABOVE = 2  # y <= x < (R^a + 1) y
    BELOW = 3  # x < y < (R^a + 1) x
    FAR_BELOW = 4  # y >= (R^a + 1) x


def classify(x: float, y: float, R_alpha: float) -> JointCdfCase:
    """Region of (x, y); boundaries belong to the lower-numbered case."""
    if x >= (R_alpha + 1.0) * y:
        return JointCdfCase.FAR_ABOVE
    if y <= x:
        return JointCdfCase.ABOVE
    if y < (R_alpha + 1.0) * x:
        return JointCdfCase.BELOW
    return JointCdfCase.FAR_BELOW


def _one_minus_exp(z):
    """1 - exp(-z) without cancellation, also for complex-step arguments."""
    if np.iscomplexobj(z):
        decay = np.exp(-z.real)
        return -np.expm1(-z.real) + decay * (1.0 - np.cos(z.imag)) + 1j * decay * np.sin(z.imag)
    return -np.expm1(-z)


class _CaseEvaluator:
    """Evaluates the joint-CDF sums for one (x, y); either argument may be complex."""

    def __init__(self, ctx: AnalyticContext, x, y):
        cfg = ctx.cfg
        self.ctx = ctx
        self.K = cfg.K
        self.R = cfg.R
        self.alpha = cfg.alpha
        self.R_alpha = cfg.R_alpha
        self.x = x
        self.y = y

    def root(self, base):
        if not np.iscomplexobj(base):
            base = np.maximum(base, 0.0)
        return base ** (1.0 / self.alpha)

    def u(self, z, r):
        """Conditional gain CDF 1 - exp(-(1 + r^alpha) z)."""
        return _one_minus_exp((1.0 + r**self.alpha) * z)

    def disc(self, lo, hi, table: QuadratureTable, g: Callable):
        """Integral of (2r/R^2) g(r) over [lo, hi] on the given rule."""
        lo = np.asarray(lo)[..., None]
        hi = np.asarray(hi)[..., None]
        half = (hi - lo) / 2.0
        r = (hi + lo) / 2.0 + half * table.nodes
        return np.sum(half * table.weights * (2.0 * r / self.R**2) * g(r), axis=-1)

    def averaged(self, z, power: int):
        """sum_l Psi_l u(z, r_l)^power."""
        return np.sum(self.ctx.Psi * self.u(z, self.ctx.radii) ** power)

    def I1(self, r):
        return self.root(self.y / self.x * (1.0 + r**self.alpha) - 1.0)

    def I2(self, r):
        return self.root(self.x / self.y * (1.0 + r**self.alpha) - 1.0)

    def inner(self, r):
        """Integral over the largest-CDF user's distance from I1(r) to R."""
        return self.disc(self.I1(r), self.R, self.ctx.phi_n_table, lambda s: self.u(self.x, s))

    def evaluate(self, case: JointCdfCase):
        K, R, x, y, ctx = self.K, self.R, self.x, self.y, self.ctx
        if case is JointCdfCase.FAR_ABOVE:
            return K * self.averaged(y, K - 1) * self.averaged(x, 1) - (K - 1) * self.averaged(y, K)
        if case is JointCdfCase.FAR_BELOW:
            return self.averaged(x, K)
        if case is JointCdfCase.ABOVE:
            a1 = self.root(x / y - 1.0)
            a2 = self.root(y / x * (self.R_alpha + 1.0) - 1.0)
            return (
                K * self.disc(0.0, a1, ctx.phi_m_table, lambda r: self.u(y, r) ** (K - 1)) * self.averaged(x, 1)
                + K * self.disc(a1, R, ctx.theta_q_table, lambda r: self.u(y, r) ** (K - 1) * self.inner(r))
                - (K - 1) * self.disc(0.0, a1, ctx.phi_m_table, lambda r: self.u(y, r) ** K)
                - (K - 1) * self.disc(a1, R, ctx.theta_q_table, lambda r: self.u(y, r) ** K * (1.0 - self.I1(r) ** 2 / R**2))
                + self.disc(0.0, a2, ctx.xi_b_table, lambda s: self.u(x, s) ** K * (1.0 - self.I2(s) ** 2 / R**2))
            )
        a1 = self.root(y / x - 1.0)
        a2 = self.root(x / y * (self.R_alpha + 1.0) - 1.0)
        return (
            K * self.disc(0.0, a2, ctx.xi_b_table, lambda r: self.u(y, r) ** (K - 1) * self.inner(r))
            - (K - 1) * self.disc(0.0, a2, ctx.xi_b_table, lambda r: self.u(y, r) ** K * (1.0 - self.I1(r) ** 2 / R**2))
            + self.disc(0.0, a1, ctx.phi_m_table, lambda s: self.u(x, s) ** K)
            + self.disc(a1, R, ctx.theta_q_table, lambda s: self.u(x, s) ** K * (1.0 - self.I2(s) ** 2 / R**2))
        )


def joint_cdf(x: float, y: float, ctx: AnalyticContext) -> float:
    """P[X < x, Y < y] for the CDF-scheduled pair."""
    if x <= 0.0 or y <= 0.0:
        return 0.0
    case = classify(x, y, ctx.cfg.R_alpha)
    value = float(np.real(_CaseEvaluator(ctx, x, y).evaluate(case)))
    return clamp_probability(value, f"joint CDF ({case.name}) at x={x!r}, y={y!r}")


def joint_cdf_dy(x: float, y: float, ctx: AnalyticContext) -> float:
    """Partial derivative of ``joint_cdf`` in y."""
    if x <= 0.0 or y <= 0.0:
        return 0.0
    case = classify(x, y, ctx.cfg.R_alpha)
    if case is JointCdfCase.FAR_BELOW:
        return 0.0
    step = COMPLEX_STEP * y
    value = _CaseEvaluator(ctx, x, complex(y, step)).evaluate(case)
    return float(np.imag(value) / step)


def joint_cdf_dx(x: float, y: float, ctx: AnalyticContext) -> float:
    """Partial derivative of ``joint_cdf`` in x."""
    if x <= 0.0 or y <= 0.0:
        return 0.0
    case = classify(x, y, ctx.cfg.R_alpha)
    step = COMPLEX_STEP * x
    value = _CaseEvaluator(ctx, complex(x, step), y).evaluate(case)
    return float(np.imag(value) / step)


def marginal_cdf_first(x, ctx: AnalyticContext) -> float:
    """P[X < x] = sum Psi (1 - exp(-mu x))^K."""
    if x <= 0.0:
        return 0.0
    value = float(np.real(_CaseEvaluator(ctx, x, x).averaged(x, ctx.cfg.K)))
    return clamp_probability(value, f"largest-CDF marginal at x={x!r}")


def marginal_cdf_second(y, ctx: AnalyticContext) -> float:
    """P[Y < y] = K sum Psi u^(K-1) - (K-1) sum Psi u^K."""
    if y <= 0.0:
        return 0.0
    K = ctx.cfg.K
    evaluator = _CaseEvaluator(ctx, y, y)
    value = float(np.real(K * evaluator.averaged(y, K - 1) - (K - 1) * evaluator.averaged(y, K)))
    return clamp_probability(value, f"second-largest-CDF marginal at y={y!r}")
