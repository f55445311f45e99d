"""
Closed-form outage probabilities of the scheduled pair.

The GUS expressions integrate over the order statistics of K i.i.d. unordered gains
with density K(K-1) f(x) f(y) F(x)^(K-2) on y > x. Each is a head term (a marginal
CDF at the rate threshold) plus a few pieces

    weight * int_lo^hi [F(u(x))^m - F(l(x))^m] f(x) F(x)^n dx

with affine u, l. A piece is integrated exactly after expanding it into a sum of
exponentials (composed series, or term by term from the tabulated exponent
constants with ``method="closed"``), or by quadrature when that expansion cancels
catastrophically. The high-SNR forms replace F(z) by S_L z and integrate the
resulting polynomial.

The CUS expressions integrate a partial derivative of the joint CDF along the lines
where the pair's rate constraints are tight. Those lines are cut wherever they cross
a joint-CDF region boundary and each segment is integrated on one region.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.stats import linregress

from .channel import largest_gain_cdf, second_largest_gain_cdf, unordered_gain_cdf, unordered_gain_pdf
from .config import SystemConfig, target_sinr
from .context import AnalyticContext, context_for
from .exceptions import AnalyticDispatchError, InvalidParameterError
from .joint_cdf import (
    JointCdfCase,
    classify,
    joint_cdf_dx,
    joint_cdf_dy,
    marginal_cdf_first,
    marginal_cdf_second,
)
from .numerics import ExponentialSeries, gc_integrate, nu
from .utils import clamp_probability

logger = logging.getLogger(__name__)

METHODS = ("auto", "series", "closed", "quadrature")
CANCELLATION_FACTOR = 64.0 * np.finfo(float).eps
CANCELLATION_TOL = 1e-6
PROBES = (0.25, 0.5, 0.75)
SEGMENT_TOL = 1e-12


# -- shared helpers ---------------------------------------------------------------


def _check_inputs(rho_m: float, *rates: float):
    if not rho_m > 0:
        raise InvalidParameterError("rho_m", f"transmit SNR must be positive, got {rho_m}")
    for rate in rates:
        if rate < 0:
            raise InvalidParameterError("rate", f"target rates must be >= 0, got {rate}")


def _threshold(rate: float, rho_m: float) -> Tuple[float, float]:
    gamma = target_sinr(rate)
    return gamma, gamma / rho_m


def _context(cfg: SystemConfig, ctx: Optional[AnalyticContext]) -> AnalyticContext:
    return ctx if ctx is not None else context_for(cfg)


def _check_method(method: str):
    if method not in METHODS:
        raise InvalidParameterError("method", f"expected one of {', '.join(METHODS)}, got {method!r}")


def _check_choice(name: str, value: str, choices: Sequence[str]):
    if value not in choices:
        raise InvalidParameterError(name, f"expected one of {', '.join(choices)}, got {value!r}")


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    return numerator / denominator if denominator > 0 else None


# -- constants ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SeriesConstants:
    """Exponent tables of the expanded GUS integrands.

    With F(z) = -sum_a A_a exp(-e_a z), f(x) = sum_l Psi_l mu_l exp(-mu_l x) and
    F^M = -sum_n B_n exp(-b_n x), every GUS piece expands into exponentials whose
    rates are tabulated here: growth rates of F(c - x) f(x) F(x)^(K-2)
    (``Delta1``) and decay rates of F(x) f(x) F(x)^(K-2) (``Delta2``), growth
    rates of F(c - x)^(K-1) f(x) (``chi3``) and decay rates of F(x)^(K-1) f(x)
    (``chi5``). ``Delta3`` and ``chi4`` depend on the target SINR. ``moments[p]``
    is sum Psi mu^p, the leading coefficient of the disc-averaged CDF power p at
    high SNR.
    """

    S_L: float
    moments: np.ndarray
    mu: np.ndarray
    pdf_weights: np.ndarray
    cdf: ExponentialSeries
    Xi_Km2: ExponentialSeries
    Xi_Km1: ExponentialSeries
    Delta1: np.ndarray
    Delta2: np.ndarray
    chi3: np.ndarray
    chi5: np.ndarray

    @property
    def cdf_exponents(self) -> np.ndarray:
        return self.cdf.exponents

    def Delta3(self, gamma: float) -> np.ndarray:
        """Decay rates of F(x / gamma - 1/rho) f(x) F(x)^(K-2)."""
        return np.add.outer(np.add.outer(self.cdf_exponents / gamma, self.mu), self.Xi_Km2.exponents)

    def chi4(self, gamma: float) -> np.ndarray:
        """Decay rates of F(x / gamma - 1/rho)^(K-1) f(x)."""
        return np.add.outer(self.Xi_Km1.exponents / gamma, self.mu)


def series_constants(ctx: AnalyticContext) -> SeriesConstants:
    def build() -> SeriesConstants:
        K = ctx.cfg.K
        cdf = ctx.cdf_series
        Xi_Km2 = ctx.cdf_power(K - 2)
        Xi_Km1 = ctx.cdf_power(K - 1)
        return SeriesConstants(
            S_L=ctx.S_L,
            moments=np.array([np.dot(ctx.Psi, ctx.mu**p) for p in range(K + 1)]),
            mu=ctx.mu,
            pdf_weights=ctx.Psi * ctx.mu,
            cdf=cdf,
            Xi_Km2=Xi_Km2,
            Xi_Km1=Xi_Km1,
            Delta1=np.subtract.outer(np.subtract.outer(cdf.exponents, ctx.mu), Xi_Km2.exponents),
            Delta2=np.add.outer(np.add.outer(cdf.exponents, ctx.mu), Xi_Km2.exponents),
            chi3=np.subtract.outer(Xi_Km1.exponents, ctx.mu),
            chi5=np.add.outer(Xi_Km1.exponents, ctx.mu),
        )

    return ctx.cache.get_or_compute("series_constants", build)


# -- breakpoints --------------------------------------------------------------------


@dataclass(frozen=True)
class CpaBreakpoints:
    """Integration limits of the CPA expressions.

    ``c`` = tau_s + tau_p (1 + gamma_s) is the sum-gain threshold of the split
    region. eps1..eps3 are where x = c - y crosses the joint-CDF region boundaries,
    eps4..eps6 where x = y / gamma_s - 1/rho does; None marks a crossing that does
    not exist.
    """

    c: float
    upper: float
    m_i1: float
    m_i2: float
    eps1: float
    eps2: float
    eps3: float
    eps4: Optional[float]
    eps5: Optional[float]
    eps6: Optional[float]


@dataclass(frozen=True)
class FpaBreakpoints:
    """Crossings of x -> (x, c - x) (eps7..eps9) and x -> (x, x / gamma - 1/rho)
    (eps10, eps11) with the joint-CDF region boundaries; c = tau (2 + gamma)."""

    c: float
    upper: float
    eps7: float
    eps8: float
    eps9: float
    eps10: Optional[float]
    eps11: Optional[float]


def cpa_breakpoints(cfg: SystemConfig, rho_m: float, Rhat_p: float, Rhat_s: float) -> CpaBreakpoints:
    _check_inputs(rho_m, Rhat_p, Rhat_s)
    gamma_p, tau_p = _threshold(Rhat_p, rho_m)
    gamma_s, tau_s = _threshold(Rhat_s, rho_m)
    R1 = cfg.R_alpha + 1.0
    c = tau_s + tau_p * (1.0 + gamma_s)
    upper = tau_s * (1.0 + gamma_p)
    eps5 = _ratio(tau_s, 1.0 - gamma_s)
    m_i1 = min(upper, c / 2.0)
    return CpaBreakpoints(
        c=c,
        upper=upper,
        m_i1=m_i1,
        m_i2=m_i1 if eps5 is None else min(m_i1, eps5),
        eps1=c / (R1 + 1.0),
        eps2=c / 2.0,
        eps3=R1 * c / (R1 + 1.0),
        eps4=_ratio(R1 * tau_s, R1 - gamma_s),
        eps5=eps5,
        eps6=_ratio(tau_s, 1.0 - R1 * gamma_s),
    )


def fpa_breakpoints(cfg: SystemConfig, rho_m: float, Rhat: float) -> FpaBreakpoints:
    _check_inputs(rho_m, Rhat)
    gamma, tau = _threshold(Rhat, rho_m)
    R1 = cfg.R_alpha + 1.0
    c = tau * (2.0 + gamma)
    return FpaBreakpoints(
        c=c,
        upper=tau * (1.0 + gamma),
        eps7=c / (R1 + 1.0),
        eps8=c / 2.0,
        eps9=R1 * c / (R1 + 1.0),
        eps10=_ratio(tau, 1.0 - gamma),
        eps11=_ratio(R1 * tau, R1 - gamma),
    )


# -- GUS: order-statistic integrals -------------------------------------------------


@dataclass(frozen=True)
class _Piece:
    """weight * int_lo^hi [F(upper(x))^power - F(lower(x))^power] f(x) F(x)^tail dx,
    with upper/lower given as (slope, offset)."""

    lo: float
    hi: float
    upper: Tuple[float, float]
    lower: Tuple[float, float]
    power: int
    tail: int
    weight: float

    @property
    def empty(self) -> bool:
        return not self.hi > self.lo


@dataclass(frozen=True)
class _GusForm:
    head: str  # "largest" or "second": which order statistic's CDF opens the sum
    head_at: float
    pieces: Tuple[_Piece, ...]


def _series_piece(piece: _Piece, ctx: AnalyticContext) -> Tuple[float, float]:
    power_series = ctx.cdf_power(piece.power)
    difference = power_series.compose_affine(*piece.upper).add(
        power_series.compose_affine(*piece.lower).scaled(-1.0)
    )
    integrand = difference.multiply(ctx.cdf_series.derivative()).multiply(ctx.cdf_power(piece.tail))
    with np.errstate(over="ignore", invalid="ignore"):
        value = piece.weight * integrand.integrate(piece.lo, piece.hi)
        magnitude = abs(piece.weight) * integrand.magnitude(piece.lo, piece.hi)
    return value, magnitude


def _closed_term(
    constants: SeriesConstants, K: int, power: int, tail: int, bound: Tuple[float, float], lo: float, hi: float
) -> float:
    """int_lo^hi F(slope x + offset)^power f(x) F(x)^tail dx summed term by term."""
    slope, offset = bound
    if power == 1 and tail == K - 2:
        series = constants.cdf
        if slope == -1.0:
            rates = -constants.Delta1
        elif slope == 1.0:
            rates = constants.Delta2
        else:
            rates = constants.Delta3(1.0 / slope)
        coefficients = np.multiply.outer(
            np.multiply.outer(series.coefficients, constants.pdf_weights), constants.Xi_Km2.coefficients
        )
    elif power == K - 1 and tail == 0:
        series = constants.Xi_Km1
        if slope == -1.0:
            rates = -constants.chi3
        elif slope == 1.0:
            rates = constants.chi5
        else:
            rates = constants.chi4(1.0 / slope)
        coefficients = -np.multiply.outer(series.coefficients, constants.pdf_weights)
    else:
        raise AnalyticDispatchError(f"No tabulated constants for F^{power} f F^{tail} with K={K}")
    shift = (-series.exponents * offset).reshape((-1,) + (1,) * (rates.ndim - 1))
    with np.errstate(over="ignore", invalid="ignore"):
        terms = coefficients * np.exp(shift - rates * lo) * nu(-rates, 0.0, hi - lo)
    return float(terms.sum())


def _closed_piece(piece: _Piece, ctx: AnalyticContext) -> float:
    constants = series_constants(ctx)
    K = ctx.cfg.K
    top = _closed_term(constants, K, piece.power, piece.tail, piece.upper, piece.lo, piece.hi)
    bottom = _closed_term(constants, K, piece.power, piece.tail, piece.lower, piece.lo, piece.hi)
    return piece.weight * (top - bottom)


def _quadrature_piece(piece: _Piece, ctx: AnalyticContext, order: int) -> float:
    def integrand(x):
        top = np.asarray(unordered_gain_cdf(piece.upper[0] * x + piece.upper[1], ctx)) ** piece.power
        bottom = np.asarray(unordered_gain_cdf(piece.lower[0] * x + piece.lower[1], ctx)) ** piece.power
        tail = np.asarray(unordered_gain_cdf(x, ctx)) ** piece.tail
        return (top - bottom) * np.asarray(unordered_gain_pdf(x, ctx)) * tail

    return piece.weight * gc_integrate(integrand, piece.lo, piece.hi, order, vectorized=True)


def _highsnr_piece(piece: _Piece, S_L: float) -> float:
    x = Polynomial([0.0, 1.0])
    upper = Polynomial([piece.upper[1], piece.upper[0]])
    lower = Polynomial([piece.lower[1], piece.lower[0]])
    antiderivative = ((upper**piece.power - lower**piece.power) * x**piece.tail).integ()
    scale = S_L ** (piece.power + piece.tail + 1)
    return piece.weight * scale * float(antiderivative(piece.hi) - antiderivative(piece.lo))


def _piece_value(piece: _Piece, ctx: AnalyticContext, method: str) -> float:
    if piece.empty:
        return 0.0
    fallback = ctx.cfg.quad_orders.fallback
    if method == "quadrature":
        return _quadrature_piece(piece, ctx, fallback)
    if method == "closed":
        return _closed_piece(piece, ctx)
    value, magnitude = _series_piece(piece, ctx)
    if method == "series":
        return value
    if np.isfinite(value) and CANCELLATION_FACTOR * magnitude <= CANCELLATION_TOL * abs(value):
        return value
    logger.debug(
        f"Series cancels on [{piece.lo:.4e}, {piece.hi:.4e}] (value {value:.4e}, "
        f"terms {magnitude:.4e}); integrating by quadrature"
    )
    return _quadrature_piece(piece, ctx, fallback)


def _evaluate_gus(form: _GusForm, ctx: AnalyticContext, method: str, what: str) -> float:
    if form.head == "largest":
        head = float(largest_gain_cdf(form.head_at, ctx))
    else:
        head = float(second_largest_gain_cdf(form.head_at, ctx))
    value = head + sum(_piece_value(piece, ctx, method) for piece in form.pieces)
    return clamp_probability(value, what)


def _evaluate_gus_highsnr(form: _GusForm, ctx: AnalyticContext, what: str) -> float:
    K = ctx.cfg.K
    S_L = series_constants(ctx).S_L
    s = S_L * form.head_at
    head = s**K if form.head == "largest" else K * s ** (K - 1) - (K - 1) * s**K
    value = head + sum(_highsnr_piece(piece, S_L) for piece in form.pieces if not piece.empty)
    return clamp_probability(value, what, warn_above=math.inf)


def gus_cpa_case(gamma_p: float, gamma_s: float) -> int:
    """Which of the three target-SINR regimes of the GUS/CPA expression applies."""
    if gamma_s >= 1.0:
        return 1
    if gamma_p > gamma_s / (1.0 - gamma_s):
        return 2
    return 3


def _gus_cpa_form(cfg: SystemConfig, rho_m: float, Rhat_p: float, Rhat_s: float) -> _GusForm:
    gamma_p, _ = _threshold(Rhat_p, rho_m)
    gamma_s, tau_s = _threshold(Rhat_s, rho_m)
    bp = cpa_breakpoints(cfg, rho_m, Rhat_p, Rhat_s)
    K = cfg.K
    pieces = [_Piece(tau_s, bp.m_i2, (-1.0, bp.c), (1.0, 0.0), 1, K - 2, K * (K - 1.0))]
    case = gus_cpa_case(gamma_p, gamma_s)
    if case == 2:
        pieces.append(_Piece(bp.eps5, bp.upper, (-1.0, bp.c), (1.0 / gamma_s, -1.0 / rho_m), 1, K - 2, K * (K - 1.0)))
    logger.debug(f"GUS/CPA regime {case} (gamma_p={gamma_p:.4g}, gamma_s={gamma_s:.4g})")
    return _GusForm("second", tau_s, tuple(pieces))


def outage_cpa_gus(
    cfg: SystemConfig,
    rho_m: float,
    Rhat_p: float,
    Rhat_s: float,
    ctx: Optional[AnalyticContext] = None,
    method: str = "auto",
) -> float:
    """Outage of the secondary user U_2 under GUS with CPA (U_1 is the primary)."""
    _check_inputs(rho_m, Rhat_p, Rhat_s)
    _check_method(method)
    if Rhat_s == 0:
        return 0.0
    form = _gus_cpa_form(cfg, rho_m, Rhat_p, Rhat_s)
    return _evaluate_gus(form, _context(cfg, ctx), method, f"GUS/CPA outage at rho={rho_m:.4g}")


def outage_cpa_gus_highsnr(
    cfg: SystemConfig, rho_m: float, Rhat_p: float, Rhat_s: float, ctx: Optional[AnalyticContext] = None
) -> float:
    _check_inputs(rho_m, Rhat_p, Rhat_s)
    if Rhat_s == 0:
        return 0.0
    form = _gus_cpa_form(cfg, rho_m, Rhat_p, Rhat_s)
    return _evaluate_gus_highsnr(form, _context(cfg, ctx), f"GUS/CPA high-SNR outage at rho={rho_m:.4g}")


def _gus_fpa_form(cfg: SystemConfig, rho_m: float, Rhat: float, which: str) -> _GusForm:
    gamma, tau = _threshold(Rhat, rho_m)
    bp = fpa_breakpoints(cfg, rho_m, Rhat)
    K = cfg.K
    if which == "first":
        lower = (1.0 / gamma, -1.0 / rho_m)
        return _GusForm(
            "largest",
            tau,
            (
                _Piece(bp.eps8, bp.upper, (-1.0, bp.c), lower, K - 1, 0, float(K)),
                _Piece(tau, bp.eps8, (1.0, 0.0), lower, K - 1, 0, float(K)),
            ),
        )
    return _GusForm("second", tau, (_Piece(tau, bp.eps8, (-1.0, bp.c), (1.0, 0.0), 1, K - 2, K * (K - 1.0)),))


def outage_fpa_gus(
    cfg: SystemConfig,
    rho_m: float,
    Rhat: float,
    which: str,
    ctx: Optional[AnalyticContext] = None,
    method: str = "auto",
) -> float:
    """Outage of U_1 (``which="first"``) or U_2 (``"second"``) under GUS with FPA."""
    _check_inputs(rho_m, Rhat)
    _check_choice("which", which, ("first", "second"))
    _check_method(method)
    if Rhat == 0:
        return 0.0
    form = _gus_fpa_form(cfg, rho_m, Rhat, which)
    return _evaluate_gus(form, _context(cfg, ctx), method, f"GUS/FPA {which} outage at rho={rho_m:.4g}")


def outage_fpa_gus_highsnr(
    cfg: SystemConfig, rho_m: float, Rhat: float, which: str, ctx: Optional[AnalyticContext] = None
) -> float:
    _check_inputs(rho_m, Rhat)
    _check_choice("which", which, ("first", "second"))
    if Rhat == 0:
        return 0.0
    form = _gus_fpa_form(cfg, rho_m, Rhat, which)
    return _evaluate_gus_highsnr(form, _context(cfg, ctx), f"GUS/FPA {which} high-SNR outage at rho={rho_m:.4g}")


# -- CUS: joint-CDF path integrals --------------------------------------------------


@dataclass(frozen=True)
class CusOutageTerms:
    """head + positive - negative: the marginal CDF at the threshold and the two
    path integrals of the joint-CDF partial derivative."""

    head: float
    positive: float
    negative: float

    @property
    def value(self) -> float:
        return self.head + self.positive - self.negative


Path = Callable[[float], Tuple[float, float]]


def _segments(lo: float, hi: float, cuts: Iterable[Optional[float]]) -> List[Tuple[float, float]]:
    points = sorted({lo, hi} | {cut for cut in cuts if cut is not None and lo < cut < hi})
    return [(a, b) for a, b in zip(points, points[1:]) if b - a > SEGMENT_TOL * abs(b)]


def _segment_case(path: Path, a: float, b: float, R_alpha: float) -> Optional[JointCdfCase]:
    cases = set()
    for fraction in PROBES:
        x, y = path(a + fraction * (b - a))
        if x > 0 and y > 0:
            cases.add(classify(x, y, R_alpha))
    if len(cases) > 1:
        names = ", ".join(case.name for case in sorted(cases))
        raise AnalyticDispatchError(f"Segment [{a!r}, {b!r}] spans joint-CDF regions {names}")
    return cases.pop() if cases else None


def _path_integral(
    ctx: AnalyticContext,
    partial: Callable[[float, float, AnalyticContext], float],
    path: Path,
    lo: float,
    hi: float,
    cuts: Iterable[Optional[float]],
    label: str,
) -> float:
    order = ctx.cfg.quad_orders.integration
    total = 0.0
    for a, b in _segments(lo, hi, cuts):
        case = _segment_case(path, a, b, ctx.cfg.R_alpha)
        if case is None or (partial is joint_cdf_dy and case is JointCdfCase.FAR_BELOW):
            logger.debug(f"{label} on [{a:.4e}, {b:.4e}] is zero")
            continue
        value = gc_integrate(lambda t: partial(*path(t), ctx), a, b, order)
        logger.debug(f"{label} on [{a:.4e}, {b:.4e}] in region {case.name}: {value:.6e}")
        total += value
    return total


def cpa_cus_terms(
    cfg: SystemConfig, rho_m: float, Rhat_p: float, Rhat_s: float, ctx: Optional[AnalyticContext] = None
) -> CusOutageTerms:
    """Terms of the secondary (second-largest-CDF) user's outage under CUS with CPA."""
    ctx = _context(cfg, ctx)
    bp = cpa_breakpoints(cfg, rho_m, Rhat_p, Rhat_s)
    gamma_s, tau_s = _threshold(Rhat_s, rho_m)
    head = marginal_cdf_second(tau_s, ctx)
    if gamma_s == 0:
        return CusOutageTerms(head, 0.0, 0.0)
    positive = _path_integral(
        ctx, joint_cdf_dy, lambda y: (bp.c - y, y), tau_s, bp.upper, (bp.eps1, bp.eps2, bp.eps3), "T1"
    )
    negative = _path_integral(
        ctx,
        joint_cdf_dy,
        lambda y: (y / gamma_s - 1.0 / rho_m, y),
        tau_s,
        bp.upper,
        (bp.eps4, bp.eps5, bp.eps6),
        "T2",
    )
    return CusOutageTerms(head, positive, negative)


def outage_cpa_cus(
    cfg: SystemConfig, rho_m: float, Rhat_p: float, Rhat_s: float, ctx: Optional[AnalyticContext] = None
) -> float:
    """Outage of the secondary user under CUS with CPA; the largest-CDF user is primary."""
    _check_inputs(rho_m, Rhat_p, Rhat_s)
    if Rhat_s == 0:
        return 0.0
    terms = cpa_cus_terms(cfg, rho_m, Rhat_p, Rhat_s, ctx)
    return clamp_probability(terms.value, f"CUS/CPA outage at rho={rho_m:.4g}")


def outage_cpa_cus_bound(
    cfg: SystemConfig,
    rho_m: float,
    Rhat_p: float,
    Rhat_s: float,
    ctx: Optional[AnalyticContext] = None,
    highsnr: bool = False,
) -> float:
    """Upper bound P[Y < tau_s (1 + gamma_p)], or its leading high-SNR polynomial."""
    _check_inputs(rho_m, Rhat_p, Rhat_s)
    ctx = _context(cfg, ctx)
    bound_at = cpa_breakpoints(cfg, rho_m, Rhat_p, Rhat_s).upper
    if not highsnr:
        return marginal_cdf_second(bound_at, ctx)
    K = cfg.K
    moments = series_constants(ctx).moments
    value = K * moments[K - 1] * bound_at ** (K - 1) - (K - 1) * moments[K] * bound_at**K
    return clamp_probability(value, f"CUS/CPA high-SNR bound at rho={rho_m:.4g}", warn_above=math.inf)


def fpa_cus_terms(cfg: SystemConfig, rho_m: float, Rhat: float, ctx: Optional[AnalyticContext] = None) -> CusOutageTerms:
    """Terms of the largest-CDF user's outage under CUS with FPA."""
    ctx = _context(cfg, ctx)
    bp = fpa_breakpoints(cfg, rho_m, Rhat)
    gamma, tau = _threshold(Rhat, rho_m)
    head = marginal_cdf_first(tau, ctx)
    if gamma == 0:
        return CusOutageTerms(head, 0.0, 0.0)
    positive = _path_integral(
        ctx, joint_cdf_dx, lambda x: (x, bp.c - x), tau, bp.upper, (bp.eps7, bp.eps8, bp.eps9), "T3"
    )
    negative = _path_integral(
        ctx, joint_cdf_dx, lambda x: (x, x / gamma - 1.0 / rho_m), tau, bp.upper, (bp.eps10, bp.eps11), "T4"
    )
    return CusOutageTerms(head, positive, negative)


def outage_fpa_cus(
    cfg: SystemConfig, rho_m: float, Rhat: float, which: str, ctx: Optional[AnalyticContext] = None
) -> float:
    """
    Outage under CUS with FPA of the largest-CDF user (``which="largest_cdf"``) or the
    runner-up (``"second_cdf"``). The runner-up's events coincide with the CPA
    secondary's once both thresholds equal its own.
    """
    _check_inputs(rho_m, Rhat)
    _check_choice("which", which, ("largest_cdf", "second_cdf"))
    if Rhat == 0:
        return 0.0
    if which == "second_cdf":
        return outage_cpa_cus(cfg, rho_m, Rhat, Rhat, ctx)
    terms = fpa_cus_terms(cfg, rho_m, Rhat, ctx)
    return clamp_probability(terms.value, f"CUS/FPA largest-CDF outage at rho={rho_m:.4g}")


def outage_fpa_cus_bound(
    cfg: SystemConfig,
    rho_m: float,
    Rhat: float,
    which: str,
    ctx: Optional[AnalyticContext] = None,
    highsnr: bool = False,
) -> float:
    _check_inputs(rho_m, Rhat)
    _check_choice("which", which, ("largest_cdf", "second_cdf"))
    if which == "second_cdf":
        return outage_cpa_cus_bound(cfg, rho_m, Rhat, Rhat, ctx, highsnr=highsnr)
    ctx = _context(cfg, ctx)
    bound_at = fpa_breakpoints(cfg, rho_m, Rhat).upper
    if not highsnr:
        return marginal_cdf_first(bound_at, ctx)
    value = series_constants(ctx).moments[cfg.K] * bound_at**cfg.K
    return clamp_probability(value, f"CUS/FPA high-SNR bound at rho={rho_m:.4g}", warn_above=math.inf)


# -- sweeps -------------------------------------------------------------------------


def diversity_slope(points: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of -log P against log rho."""
    points = list(points)
    if len(points) < 2:
        raise InvalidParameterError("points", "at least two points are required")
    rho = np.array([point[0] for point in points], dtype=float)
    probability = np.array([point[1] for point in points], dtype=float)
    if np.any(probability <= 0):
        raise InvalidParameterError("points", "outage probabilities must be positive")
    if np.any(np.diff(rho) <= 0):
        raise InvalidParameterError("points", "rho must be strictly increasing")
    return float(linregress(np.log(rho), -np.log(probability)).slope)


def outage_curve(
    fn: Callable[..., float], cfg: SystemConfig, powers_dbm: Iterable[float], *args, **kwargs
) -> List[Tuple[float, float]]:
    """Evaluate ``fn(cfg, rho_m, *args, ctx=..., **kwargs)`` at each transmit power."""
    ctx = kwargs.pop("ctx", None) or context_for(cfg)
    curve = []
    for power in powers_dbm:
        point = cfg.with_power(power)
        value = fn(point, point.rho_m, *args, ctx=ctx, **kwargs)
        logger.debug(f"{getattr(fn, '__name__', fn)} at {power} dBm: {value:.6e}")
        curve.append((float(power), value))
    return curve


def curve_slope(cfg: SystemConfig, curve: Sequence[Tuple[float, float]]) -> float:
    """Diversity slope of a (power_dbm, probability) curve."""
    return diversity_slope([(cfg.transmit_snr(power), value) for power, value in curve])
