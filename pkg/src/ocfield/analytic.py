"""Closed-form link statistics for optimum (MMSE) combining in a Poisson
field of Rayleigh-faded interferers.

Everything here is a pure function of its arguments.  Thresholds are linear;
converting from dB is the CLI's job.  The normalized threshold used
throughout is gamma = beta * d_r**alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SystemParams",
    "array_gain",
    "delta_const",
    "gamma_from_beta",
    "outage_cdf",
    "outage_interference_limited",
    "outage_noise_limited",
    "sir_mean",
    "sir_variance",
    "throughput_density",
]


@dataclass(frozen=True)
class SystemParams:
    """One scenario of the interference field and the desired link.

    lam     spatial density of interferers (nodes per m^2)
    alpha   path-loss exponent, must exceed 2
    sigma2  noise level: the scalar on the identity in the interference-plus-
            noise covariance (total complex noise variance; unit tx power)
    d_r     desired-link distance (m)
    L       number of receive antennas
    beta    linear SINR threshold
    """

    lam: float
    alpha: float
    sigma2: float
    d_r: float
    L: int
    beta: float

    def __post_init__(self) -> None:
        if not self.alpha > 2.0:
            raise ValueError(f"alpha must be > 2, got {self.alpha}")
        if not self.lam >= 0.0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not self.sigma2 >= 0.0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if not self.d_r > 0.0:
            raise ValueError(f"d_r must be > 0, got {self.d_r}")
        if not (isinstance(self.L, int) and self.L >= 1):
            raise ValueError(f"L must be an integer >= 1, got {self.L}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    @property
    def gamma(self) -> float:
        """Normalized threshold beta * d_r**alpha."""
        return gamma_from_beta(self.beta, self.d_r, self.alpha)


def gamma_from_beta(beta: float, d_r: float, alpha: float) -> float:
    """Threshold rescaled by the desired-link path loss: beta * d_r**alpha."""
    if not beta > 0.0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if not d_r > 0.0:
        raise ValueError(f"d_r must be > 0, got {d_r}")
    if not alpha > 2.0:
        raise ValueError(f"alpha must be > 2, got {alpha}")
    return beta * d_r**alpha


def delta_const(alpha: float) -> float:
    """Geometry constant of the plane interference integral.

    Evaluated as 2*pi**2 / (alpha * sin(2*pi/alpha)), the reflection-formula
    form of pi * (2/alpha) * Gamma(2/alpha) * Gamma(1 - 2/alpha).  The
    underlying integral diverges for alpha <= 2, hence the domain check.
    """
    if not alpha > 2.0:
        raise ValueError(f"alpha must be > 2, got {alpha}")
    return 2.0 * math.pi**2 / (alpha * math.sin(2.0 * math.pi / alpha))


def _poisson_cdf(x: float, count: int) -> float:
    # P(Poisson(x) < count).  Terms built by the multiplicative recurrence
    # anchored at exp(-x), so x**i and i! never overflow separately.  With
    # x = 0 the i = 0 term is exp(0) = 1, which encodes the 0**0 = 1
    # convention.
    term = math.exp(-x)
    total = term
    for i in range(1, count):
        term *= x / i
        total += term
    return total


def _interference_exponent(lam: float, alpha: float, gamma: float) -> float:
    return lam * delta_const(alpha) * gamma ** (2.0 / alpha)


def _clamp01(p: float) -> float:
    return min(1.0, max(0.0, p))


def outage_cdf(params: SystemParams) -> float:
    """Outage probability of the optimum combiner.

    F = 1 - sum_{i<L} x**i / i! * exp(-x)  with
    x = lam * Delta * gamma**(2/alpha) + sigma2 * gamma.

    With lam = 0 this reduces bit-for-bit to `outage_noise_limited`, and with
    sigma2 = 0 to `outage_interference_limited` (same code path).
    """
    gamma = params.gamma
    x = _interference_exponent(params.lam, params.alpha, gamma) + params.sigma2 * gamma
    return _clamp01(1.0 - _poisson_cdf(x, params.L))


def outage_noise_limited(L: int, sigma2: float, gamma: float) -> float:
    """Outage with no interferers: the chi-square CDF of the combined SNR."""
    _check_antennas(L)
    if not sigma2 >= 0.0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    if not gamma >= 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return _clamp01(1.0 - _poisson_cdf(sigma2 * gamma, L))


def outage_interference_limited(L: int, lam: float, alpha: float, gamma: float) -> float:
    """Outage with negligible noise.

    Equals the probability that a Poisson count of mean
    lam * pi * r**2, r = sqrt(Delta/pi) * gamma**(1/alpha), reaches L: the
    event that the L-th strongest interferer sits inside the rescaled
    threshold radius.
    """
    _check_antennas(L)
    if not lam >= 0.0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if not gamma >= 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return _clamp01(1.0 - _poisson_cdf(_interference_exponent(lam, alpha, gamma), L))


def _check_antennas(L: int) -> None:
    if not (isinstance(L, int) and L >= 1):
        raise ValueError(f"L must be an integer >= 1, got {L}")


def _gamma_ratio(a: float, b: float) -> float:
    # Gamma(a) / Gamma(b); exact library gamma for small arguments, log-domain
    # difference once either would overflow.
    if a < 170.0 and b < 170.0:
        return math.gamma(a) / math.gamma(b)
    return math.exp(math.lgamma(a) - math.lgamma(b))


def array_gain(L: int, alpha: float) -> float:
    """Mean-SIR gain of the combiner: Gamma(L + alpha/2) / (L-1)!."""
    _check_antennas(L)
    if not alpha > 2.0:
        raise ValueError(f"alpha must be > 2, got {alpha}")
    return _gamma_ratio(L + 0.5 * alpha, L)


def sir_mean(L: int, alpha: float, lam: float, d_r: float) -> float:
    """Mean SIR in the interference-limited regime.

    Gamma(L + alpha/2)/(L-1)! * d_r**-alpha / (lam * Delta)**(alpha/2).
    Diverges as lam -> 0, so zero density is a domain error.
    """
    _check_antennas(L)
    if not lam > 0.0:
        raise ValueError(f"lam must be > 0 for SIR moments, got {lam}")
    if not d_r > 0.0:
        raise ValueError(f"d_r must be > 0, got {d_r}")
    scale = (lam * delta_const(alpha)) ** (0.5 * alpha)
    return array_gain(L, alpha) * d_r ** (-alpha) / scale


def sir_variance(L: int, alpha: float, lam: float, d_r: float) -> float:
    """Variance of the SIR in the interference-limited regime."""
    _check_antennas(L)
    if not lam > 0.0:
        raise ValueError(f"lam must be > 0 for SIR moments, got {lam}")
    if not d_r > 0.0:
        raise ValueError(f"d_r must be > 0, got {d_r}")
    second = _gamma_ratio(L + alpha, L)
    first = _gamma_ratio(L + 0.5 * alpha, L)
    return (second - first * first) * d_r ** (-2.0 * alpha) / (lam * delta_const(alpha)) ** alpha


def throughput_density(params: SystemParams) -> float:
    """Successful transmissions per unit area: lam * (1 - outage)."""
    return params.lam * (1.0 - outage_cdf(params))
