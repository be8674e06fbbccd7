"""Slotted-ALOHA contention density optimization for the optimum combiner.

In the interference-limited regime the spatial throughput lam * (1 - F) is
maximized in closed form: the optimum sits at g(L) / (Delta * gamma**(2/alpha))
where g(L) is the unique positive root of

    Q(t) = sum_{i<L} t**i / i!  -  t**L / (L-1)!

and always lies in [L/2, L].  With noise there is no closed form; a labeled
grid maximizer is provided for that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import _poisson_cdf, delta_const

__all__ = [
    "BracketViolation",
    "ContentionOptimum",
    "contention_optimum",
    "g_of_l",
    "lambda_max",
    "q_poly",
    "q_poly_scaled",
    "throughput_grid_max",
    "throughput_max",
]


class BracketViolation(RuntimeError):
    """The guaranteed sign pattern of Q on [L/2, L] failed: implementation bug."""


@dataclass(frozen=True)
class ContentionOptimum:
    """Closed-form optimum for one antenna count.

    g lies in [L/2, L]; lambda_max and t_max are per unit area.
    """

    L: int
    g: float
    lambda_max: float
    t_max: float


def _check_antennas(L: int) -> None:
    if not (isinstance(L, int) and L >= 1):
        raise ValueError(f"L must be an integer >= 1, got {L}")


def q_poly(L: int, t: float) -> float:
    """Q(t) = sum_{i<L} t**i/i! - t**L/(L-1)!, by the multiplicative recurrence.

    Direct evaluation; cancellation grows with L, so the root finder works on
    `q_poly_scaled` instead.
    """
    _check_antennas(L)
    if not t >= 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    term = 1.0
    total = 1.0
    for i in range(1, L):
        term *= t / i
        total += term
    return total - term * t


def q_poly_scaled(L: int, t: float) -> float:
    """exp(-t) * Q(t): same sign and same roots, O(1) magnitudes for any L."""
    return _q_scaled_with_derivative(L, t)[0]


def _q_scaled_with_derivative(L: int, t: float) -> tuple[float, float]:
    # Anchoring the recurrence at exp(-t) keeps every term a Poisson pmf
    # value.  d/dt [exp(-t) Q(t)] collapses to pmf(L-1; t) * (t - L - 1).
    term = math.exp(-t)
    total = term
    for i in range(1, L):
        term *= t / i
        total += term
    return total - term * t, term * (t - (L + 1.0))


def g_of_l(L: int, rel_tol: float = 1e-12) -> float:
    """Unique positive root of Q, bisected on the guaranteed bracket [L/2, L].

    Endpoint roots are returned exactly (L = 1 gives 1.0); otherwise bisection
    to `rel_tol` is polished with one Newton step on the scaled form.
    """
    _check_antennas(L)
    lo, hi = 0.5 * L, float(L)
    q_lo = q_poly_scaled(L, lo)
    q_hi = q_poly_scaled(L, hi)
    if q_hi == 0.0:
        return hi
    if q_lo == 0.0:
        return lo
    if q_lo < 0.0 or q_hi > 0.0:
        raise BracketViolation(
            f"expected Q(L/2) > 0 and Q(L) < 0, got Q({lo}) = {q_lo}, Q({hi}) = {q_hi}"
        )
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        q_mid = q_poly_scaled(L, mid)
        if q_mid > 0.0:
            lo = mid
        elif q_mid < 0.0:
            hi = mid
        else:
            return mid
    g = 0.5 * (lo + hi)
    value, slope = _q_scaled_with_derivative(L, g)
    if slope != 0.0:
        g = min(max(g - value / slope, 0.5 * L), float(L))
    return g


def lambda_max(L: int, alpha: float, gamma: float) -> float:
    """Optimum contention density g(L) / (Delta * gamma**(2/alpha)).

    Interference-limited result (sigma2 = 0 assumed).
    """
    return g_of_l(L) / _normalized_area(alpha, gamma)


def throughput_max(L: int, alpha: float, gamma: float) -> float:
    """Peak spatial throughput g**(L+1) * exp(-g) / ((L-1)! * Delta * gamma**(2/alpha))."""
    g = g_of_l(L)
    # log-domain numerator: g**(L+1)/(L-1)! overflows on its own near L ~ 150
    peak = math.exp((L + 1) * math.log(g) - math.lgamma(L) - g)
    return peak / _normalized_area(alpha, gamma)


def _normalized_area(alpha: float, gamma: float) -> float:
    if not gamma > 0.0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return delta_const(alpha) * gamma ** (2.0 / alpha)


def contention_optimum(L: int, alpha: float, gamma: float) -> ContentionOptimum:
    """Bundle g(L), lambda_max and t_max for one antenna count."""
    g = g_of_l(L)
    area = _normalized_area(alpha, gamma)
    peak = math.exp((L + 1) * math.log(g) - math.lgamma(L) - g)
    return ContentionOptimum(L=L, g=g, lambda_max=g / area, t_max=peak / area)


def throughput_grid_max(
    L: int,
    alpha: float,
    gamma: float,
    sigma2: float,
    points: int = 400,
    refinements: int = 4,
) -> tuple[float, float]:
    """Grid maximizer of lam * (1 - F) when sigma2 > 0 (no closed form).

    Log grid between generous brackets around the noise-free optimum, then a
    few zoom passes around the running argmax.  Returns (lambda, throughput).
    """
    _check_antennas(L)
    if not sigma2 >= 0.0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    area = _normalized_area(alpha, gamma)
    noise = sigma2 * gamma

    def objective(lam: float) -> float:
        return lam * _poisson_cdf(lam * area + noise, L)

    # the optimum exponent lam*area + noise sits right of g(L) and below
    # noise + L + a few standard deviations of the Poisson peak
    x_hi = noise + g_of_l(L) + 4.0 * L + 10.0
    lo, hi = g_of_l(L) / area * 1e-3, x_hi / area
    best_lam, best_val = lo, objective(lo)
    for _ in range(refinements):
        grid = [lo * (hi / lo) ** (k / (points - 1)) for k in range(points)]
        for lam in grid:
            val = objective(lam)
            if val > best_val:
                best_lam, best_val = lam, val
        step = (hi / lo) ** (1.0 / (points - 1))
        lo, hi = best_lam / step, best_lam * step
    return best_lam, best_val
