"""
Numerical primitives shared by the closed-form evaluators: the Gauss-Chebyshev
rule, sums of decaying exponentials with exact interval integration, and the
multinomial expansion of their powers.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Tuple

import numpy as np
from scipy.special import factorial

from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

EXPONENT_MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuadratureTable:
    """Gauss-Chebyshev nodes on (-1, 1) with their weights.

    ``weights`` are the first-kind sine weights (pi/n)*sqrt(1 - t^2) rescaled to sum
    to 2, so a mapped rule integrates constants exactly.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def map(self, a, b) -> Tuple[np.ndarray, np.ndarray]:
        """Abscissas and weights of the rule on [a, b]."""
        half = (b - a) / 2.0
        mid = (a + b) / 2.0
        return mid + half * self.nodes, half * self.weights


@lru_cache(maxsize=None)
def chebyshev_nodes(order: int) -> QuadratureTable:
    """
    Gauss-Chebyshev table of the given order.

    The weights are not the textbook pi/n sine weights: they are rescaled to sum to
    2, which makes the unordered-gain constants Psi_l = w_l (1 + psi_l) / 2 sum to
    one; the unscaled (pi/L) sqrt(1 - psi^2) (1 + psi) sums to about 2.008, not 2, at
    order 10.
    """
    if order < 1:
        raise InvalidParameterError("order", f"must be >= 1, got {order}")
    index = np.arange(1, order + 1)
    nodes = np.cos((2 * index - 1) * np.pi / (2 * order))
    raw = (np.pi / order) * np.sqrt(1.0 - nodes**2)
    weights = 2.0 * raw / raw.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureTable(order=order, nodes=nodes, weights=weights)


def gc_integrate(
    f: Callable, a: float, b: float, order: int, vectorized: bool = False
) -> float:
    """
    Gauss-Chebyshev approximation of the integral of f over [a, b].

    With ``vectorized`` the integrand is called once on the array of abscissas.
    """
    if a > b:
        raise InvalidParameterError("interval", f"lower bound {a} exceeds upper bound {b}")
    if a == b:
        return 0.0
    x, w = chebyshev_nodes(order).map(a, b)
    if vectorized:
        values = np.asarray(f(x))
    else:
        values = np.array([f(point) for point in x])
    return float(np.dot(w, values))


def nu(delta, a, b):
    """
    Integral of exp(delta*t) over [a, b], i.e. (exp(delta*b) - exp(delta*a)) / delta.

    The upper limit leads so the value tends to b - a as delta goes to 0: nu(1, 0, 1)
    is e - 1, not 1 - e.
    """
    delta = np.asarray(delta, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tol = 1e-12 * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    small = np.abs(delta) <= tol
    safe = np.where(small, 1.0, delta)
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.exp(safe * a) * np.expm1(safe * (b - a)) / safe
    result = np.where(small, b - a, value)
    if result.ndim == 0:
        return float(result)
    return result


@dataclass(frozen=True, eq=False)
class ExponentialSeries:
    """s(x) = -sum_k coefficients[k] * exp(-exponents[k] * x)

    The leading minus keeps the rewritten gain CDF in its natural form: with
    Psi_0 = -sum(Psi) and mu_0 = 0 the series equals sum Psi (1 - exp(-mu x)).
    """

    coefficients: np.ndarray
    exponents: np.ndarray

    def __post_init__(self):
        coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        exponents = np.atleast_1d(np.asarray(self.exponents, dtype=float))
        if coefficients.shape != exponents.shape:
            raise InvalidParameterError(
                "exponents", "must have the same length as coefficients"
            )
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "exponents", exponents)

    @classmethod
    def from_gain_constants(cls, Psi, mu) -> "ExponentialSeries":
        Psi = np.asarray(Psi, dtype=float)
        mu = np.asarray(mu, dtype=float)
        return cls(
            coefficients=np.concatenate(([-Psi.sum()], Psi)),
            exponents=np.concatenate(([0.0], mu)),
        )

    @classmethod
    def constant(cls, value: float) -> "ExponentialSeries":
        return cls(coefficients=[-value], exponents=[0.0])

    def __len__(self) -> int:
        return len(self.coefficients)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            terms = np.exp(-np.multiply.outer(x, self.exponents))
        value = -(terms @ self.coefficients)
        if np.ndim(value) == 0:
            return float(value)
        return value

    def derivative(self) -> "ExponentialSeries":
        return ExponentialSeries(-self.coefficients * self.exponents, self.exponents)

    def scaled(self, factor: float) -> "ExponentialSeries":
        return ExponentialSeries(self.coefficients * factor, self.exponents)

    def add(self, other: "ExponentialSeries") -> "ExponentialSeries":
        return ExponentialSeries(
            np.concatenate((self.coefficients, other.coefficients)),
            np.concatenate((self.exponents, other.exponents)),
        ).merged()

    def multiply(self, other: "ExponentialSeries") -> "ExponentialSeries":
        coefficients = -np.multiply.outer(self.coefficients, other.coefficients)
        exponents = np.add.outer(self.exponents, other.exponents)
        return ExponentialSeries(coefficients.ravel(), exponents.ravel()).merged()

    def compose_affine(self, slope: float, offset: float) -> "ExponentialSeries":
        """The series of x -> s(slope * x + offset)."""
        with np.errstate(over="ignore"):
            coefficients = self.coefficients * np.exp(-self.exponents * offset)
        return ExponentialSeries(coefficients, self.exponents * slope)

    def term_integrals(self, a: float, b: float) -> np.ndarray:
        return -self.coefficients * nu(-self.exponents, a, b)

    def integrate(self, a: float, b: float) -> float:
        """Exact integral over [a, b]."""
        return float(np.sum(self.term_integrals(a, b)))

    def magnitude(self, a: float, b: float) -> float:
        """Sum of absolute term integrals; bounds the cancellation in ``integrate``."""
        return float(np.sum(np.abs(self.term_integrals(a, b))))

    def merged(self, tol: float = EXPONENT_MERGE_TOL) -> "ExponentialSeries":
        if len(self) <= 1:
            return self
        order = np.argsort(self.exponents, kind="stable")
        exponents = self.exponents[order]
        coefficients = self.coefficients[order]
        scale = np.maximum(1.0, np.abs(exponents[1:]))
        breaks = np.diff(exponents) > tol * scale
        groups = np.concatenate(([0], np.cumsum(breaks)))
        starts = np.concatenate(([0], np.flatnonzero(breaks) + 1))
        summed = np.bincount(groups, weights=coefficients)
        return ExponentialSeries(summed, exponents[starts])


def _compositions(M: int, parts: int) -> np.ndarray:
    """All (p_0, ..., p_{parts-1}) >= 0 summing to M, in lexicographic order."""
    rows = [
        np.bincount(combo, minlength=parts)
        for combo in combinations_with_replacement(range(parts), M)
    ]
    return np.array(rows, dtype=int)[::-1]


def multinomial_power(series: ExponentialSeries, M: int) -> ExponentialSeries:
    """
    Expand series(x)**M with the multinomial theorem; the sign (-1)**M is folded
    into the coefficients.
    """
    if M < 0:
        raise InvalidParameterError("M", f"must be non-negative, got {M}")
    if M == 0:
        return ExponentialSeries.constant(1.0)
    if M == 1:
        return series
    keep = series.coefficients != 0.0
    coefficients = series.coefficients[keep]
    exponents = series.exponents[keep]
    if coefficients.size == 0:
        return ExponentialSeries.constant(0.0)
    powers = _compositions(M, coefficients.size)
    multinomial = factorial(M) / np.prod(factorial(powers), axis=1)
    products = np.prod(np.power(coefficients, powers), axis=1)
    sign = -((-1.0) ** M)
    expanded = ExponentialSeries(
        coefficients=sign * multinomial * products,
        exponents=powers @ exponents,
    ).merged()
    logger.debug(
        f"Expanded power {M} of a {len(series)}-term series into {len(expanded)} terms"
    )
    return expanded
