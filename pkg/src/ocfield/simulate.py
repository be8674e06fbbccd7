"""Monte Carlo simulator of the physical link model.

Each trial draws a fresh Poisson field and fresh Rayleigh channels, builds the
interference-plus-noise covariance, and evaluates the post-combining SINR of
the chosen receiver.  Estimates are reproducible by construction: trial i
draws exclusively from a Philox substream addressed by (master_seed, i), and
reductions are order-independent, so results are bit-identical for any worker
count (OC_FIELD_THREADS) and any scheduling.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import SystemParams
from .linalg import project_out, quadratic_form_inverse

__all__ = [
    "ChannelDraw",
    "NetworkRealization",
    "OutageEstimate",
    "SinrSample",
    "SirMomentsEstimate",
    "TrialStream",
    "build_covariance",
    "combiner_sinr",
    "combiner_weights",
    "conditional_outage_cdf",
    "covariance_from_powers",
    "default_pzf_k",
    "draw_channels",
    "estimate_outage",
    "estimate_outage_conditional",
    "estimate_sir_moments",
    "oc_sinr",
    "receiver_label",
    "sample_ppp",
    "sinr_sample",
    "trial_generator",
]

RECEIVERS = ("oc", "mrc", "zf", "pzf")

_MASK64 = (1 << 64) - 1


class TrialStream:
    """Philox generator repositionable onto the substream of any trial.

    The key carries the master seed; the trial index is written into a high
    counter word, giving every trial a disjoint 2**128-tick block.  Seeking is
    a counter write, far cheaper than constructing a Generator per trial.
    """

    def __init__(self, master_seed: int):
        if not (isinstance(master_seed, int) and 0 <= master_seed <= _MASK64):
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
        self._bitgen = np.random.Philox(key=np.array([master_seed, 0], dtype=np.uint64))
        self.generator = np.random.Generator(self._bitgen)

    def at(self, trial_index: int) -> np.random.Generator:
        """Position on trial `trial_index` and return the shared Generator."""
        state = self._bitgen.state
        state["state"]["counter"] = np.array([0, 0, trial_index, 0], dtype=np.uint64)
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        state["uinteger"] = 0
        self._bitgen.state = state
        return self.generator


def trial_generator(master_seed: int, trial_index: int) -> np.random.Generator:
    """Standalone generator on the (master_seed, trial_index) substream."""
    return TrialStream(master_seed).at(trial_index)


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """One sampled interferer field; the receiver sits at the origin."""

    disk_radius: float
    radii: np.ndarray
    azimuths: np.ndarray

    @property
    def node_count(self) -> int:
        return self.radii.shape[0]

    @property
    def positions(self) -> np.ndarray:
        """Cartesian node coordinates, shape (node_count, 2), meters."""
        return np.column_stack(
            (self.radii * np.cos(self.azimuths), self.radii * np.sin(self.azimuths))
        )


@dataclass(frozen=True, eq=False)
class ChannelDraw:
    """Desired and interferer channel vectors for one trial (CN(0,1) entries)."""

    desired: np.ndarray  # (L,)
    interferers: np.ndarray  # (node_count, L)


@dataclass(frozen=True)
class SinrSample:
    """Post-combining SINR of one receiver in one trial (math.inf allowed)."""

    receiver: str
    value: float
    trial_index: int


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo outage estimate with its binomial standard error."""

    p_hat: float
    stderr: float
    n_trials: int
    master_seed: int


@dataclass(frozen=True)
class SirMomentsEstimate:
    """Sample mean/variance of the SIR; infinite samples are excluded."""

    mean: float
    variance: float
    n_trials: int
    n_infinite: int
    master_seed: int


def sample_ppp(lam: float, expected_count: int, rng: np.random.Generator) -> NetworkRealization:
    """Draw one field: disk sized for `expected_count` nodes on average.

    disk_radius = sqrt(expected_count / (lam * pi)); the node count is
    Poisson(expected_count); positions are uniform on the disk via
    r = disk_radius * sqrt(u).
    """
    if not lam > 0.0:
        raise ValueError(f"lam must be > 0, got {lam}")
    if not expected_count >= 1:
        raise ValueError(f"expected_count must be >= 1, got {expected_count}")
    radius = math.sqrt(expected_count / (lam * math.pi))
    n = int(rng.poisson(expected_count))
    u = rng.random(2 * n)
    return NetworkRealization(
        disk_radius=radius,
        radii=radius * np.sqrt(u[:n]),
        azimuths=(2.0 * math.pi) * u[n:],
    )


def draw_channels(L: int, n: int, rng: np.random.Generator) -> ChannelDraw:
    """n+1 independent channel vectors with i.i.d. CN(0,1) entries.

    Real and imaginary parts carry variance 1/2 each, so |entry|^2 is a unit-
    mean exponential (Rayleigh power).
    """
    z = rng.standard_normal(2 * (n + 1) * L).view(np.complex128)
    z *= math.sqrt(0.5)
    return ChannelDraw(desired=z[:L], interferers=z[L:].reshape(n, L))


def covariance_from_powers(powers: np.ndarray, ch: ChannelDraw, sigma2: float) -> np.ndarray:
    """sum_k P_k c_k c_k^H + sigma2 I for given received powers P_k."""
    L = ch.desired.shape[0]
    cov = (ch.interferers.T * powers) @ ch.interferers.conj()
    cov[np.arange(L), np.arange(L)] += sigma2
    return cov


def build_covariance(
    net: NetworkRealization, ch: ChannelDraw, sigma2: float, alpha: float
) -> np.ndarray:
    """Interference-plus-noise covariance of one trial.

    Received powers are |X_k|**-alpha; the noise enters only through the
    sigma2 I term (the SINR statistic depends on the noise vector through its
    covariance alone, so it is never sampled).
    """
    return covariance_from_powers(net.radii ** (-alpha), ch, sigma2)


def oc_sinr(
    net: NetworkRealization,
    ch: ChannelDraw,
    params: SystemParams,
    cov: np.ndarray | None = None,
) -> float:
    """SINR of the optimum (MMSE) combiner: d_r**-alpha * c_r^H R^{-1} c_r.

    math.inf when R is singular (sigma2 = 0, fewer nodes than antennas) and
    the desired vector leaves its column space, which a generic draw does.
    """
    if cov is None:
        cov = build_covariance(net, ch, params.sigma2, params.alpha)
    return params.d_r ** (-params.alpha) * quadratic_form_inverse(ch.desired, cov)


def combiner_sinr(
    w: np.ndarray, net: NetworkRealization, ch: ChannelDraw, params: SystemParams
) -> float:
    """SINR of an arbitrary combining vector w.

    The denominator is accumulated per interferer (all terms nonnegative), so
    comparisons against `oc_sinr` stay clean even when projection has nulled
    the dominant interferers.  A zero denominator with signal present is a
    legitimately infinite SINR.
    """
    w = np.asarray(w, dtype=np.complex128)
    w_norm2 = float(w.real @ w.real + w.imag @ w.imag)
    if w_norm2 == 0.0:
        raise ValueError("combining weights are identically zero")
    z = ch.interferers @ w.conj()
    powers = net.radii ** (-params.alpha)
    den = float(powers @ (z.real**2 + z.imag**2)) + params.sigma2 * w_norm2
    s = complex(w.conj() @ ch.desired)
    num = params.d_r ** (-params.alpha) * (s.real**2 + s.imag**2)
    if den > 0.0:
        return num / den
    return math.inf if num > 0.0 else 0.0


def default_pzf_k(L: int) -> int:
    """Default partial zero-forcing cancellation count: ceil(L/2)."""
    return (L + 1) // 2


def combiner_weights(
    receiver: str,
    net: NetworkRealization,
    ch: ChannelDraw,
    pzf_k: int | None = None,
) -> np.ndarray:
    """Weight vector for mrc / zf / pzf (oc needs no explicit weights).

    ZF projects the desired channel orthogonal to the min(n, L-1) strongest
    interferers, PZF to the min(n, k) strongest; strength is ranked by
    average received power (position only), ties broken by node index.  The
    zero vector comes back when the desired channel lies in the cancelled
    span; callers read that as zero SINR.
    """
    if receiver == "mrc":
        return ch.desired
    L = ch.desired.shape[0]
    if receiver == "zf":
        k = L - 1
    elif receiver == "pzf":
        k = default_pzf_k(L) if pzf_k is None else pzf_k
        if k < 0:
            raise ValueError(f"pzf cancellation count must be >= 0, got {k}")
    else:
        raise ValueError(f"unknown combiner {receiver!r}; expected one of {RECEIVERS[1:]}")
    k = min(net.node_count, k)
    if k == 0:
        return ch.desired
    strongest = np.argsort(net.radii, kind="stable")[:k]
    return project_out(ch.desired, list(ch.interferers[strongest]))


def receiver_label(receiver: str, L: int, pzf_k: int | None = None) -> str:
    """Canonical row label: oc / mrc / zf / pzf<k>."""
    if receiver == "pzf":
        return f"pzf{default_pzf_k(L) if pzf_k is None else pzf_k}"
    return receiver


def _trial_sinr(
    rng: np.random.Generator,
    params: SystemParams,
    expected_count: int,
    receiver: str,
    pzf_k: int | None,
) -> float:
    net = sample_ppp(params.lam, expected_count, rng)
    ch = draw_channels(params.L, net.node_count, rng)
    if receiver == "oc":
        return oc_sinr(net, ch, params)
    w = combiner_weights(receiver, net, ch, pzf_k)
    if not w.any():
        return 0.0
    return combiner_sinr(w, net, ch, params)


def sinr_sample(
    params: SystemParams,
    receiver: str,
    trial_index: int,
    master_seed: int,
    expected_count: int = 100,
    pzf_k: int | None = None,
) -> SinrSample:
    """One reproducible SINR draw on the (master_seed, trial_index) substream."""
    _check_receiver(receiver)
    rng = trial_generator(master_seed, trial_index)
    value = _trial_sinr(rng, params, expected_count, receiver, pzf_k)
    return SinrSample(
        receiver=receiver_label(receiver, params.L, pzf_k),
        value=value,
        trial_index=trial_index,
    )


def _check_receiver(receiver: str) -> None:
    if receiver not in RECEIVERS:
        raise ValueError(f"unknown receiver {receiver!r}; expected one of {RECEIVERS}")


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("OC_FIELD_THREADS", "1"))
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _spans(n: int, parts: int) -> list[tuple[int, int]]:
    parts = min(parts, n) if n else 1
    base, rem = divmod(n, parts)
    spans, start = [], 0
    for i in range(parts):
        stop = start + base + (1 if i < rem else 0)
        spans.append((start, stop))
        start = stop
    return spans


def _run_spans(worker, n_trials: int, workers: int) -> list:
    spans = _spans(n_trials, workers)
    if len(spans) == 1:
        return [worker(*spans[0])]
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        return list(pool.map(lambda span: worker(*span), spans))


def estimate_outage(
    params: SystemParams,
    receiver: str = "oc",
    n_trials: int = 10_000,
    master_seed: int = 0,
    expected_count: int = 100,
    pzf_k: int | None = None,
    workers: int | None = None,
) -> OutageEstimate:
    """Monte Carlo outage probability: fraction of trials with SINR < beta.

    Infinite SINR counts as success for any finite threshold.  Bit-identical
    for a given master_seed under any worker count: trial i depends only on
    (master_seed, i) and the reduction is a commutative count.
    """
    _check_receiver(receiver)
    if not n_trials >= 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    workers = _resolve_workers(workers)
    beta = params.beta

    def count_span(start: int, stop: int) -> int:
        stream = TrialStream(master_seed)
        count = 0
        for i in range(start, stop):
            count += _trial_sinr(stream.at(i), params, expected_count, receiver, pzf_k) < beta
        return count

    total = sum(_run_spans(count_span, n_trials, workers))
    p = total / n_trials
    return OutageEstimate(
        p_hat=p,
        stderr=math.sqrt(p * (1.0 - p) / n_trials),
        n_trials=n_trials,
        master_seed=master_seed,
    )


def estimate_outage_conditional(
    powers: np.ndarray,
    sigma2: float,
    L: int,
    gamma: float,
    n_trials: int = 10_000,
    master_seed: int = 0,
    workers: int | None = None,
) -> OutageEstimate:
    """Fading-only outage for a frozen set of received powers.

    The field is held fixed and only the channels are redrawn, so this
    estimates exactly the quantity `conditional_outage_cdf` computes.
    """
    if not n_trials >= 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    powers = np.asarray(powers, dtype=np.float64)
    n = powers.shape[0]
    workers = _resolve_workers(workers)

    def count_span(start: int, stop: int) -> int:
        stream = TrialStream(master_seed)
        count = 0
        for i in range(start, stop):
            ch = draw_channels(L, n, stream.at(i))
            cov = covariance_from_powers(powers, ch, sigma2)
            count += quadratic_form_inverse(ch.desired, cov) < gamma
        return count

    total = sum(_run_spans(count_span, n_trials, workers))
    p = total / n_trials
    return OutageEstimate(
        p_hat=p,
        stderr=math.sqrt(p * (1.0 - p) / n_trials),
        n_trials=n_trials,
        master_seed=master_seed,
    )


def estimate_sir_moments(
    params: SystemParams,
    receiver: str = "oc",
    n_trials: int = 10_000,
    master_seed: int = 0,
    expected_count: int = 100,
    pzf_k: int | None = None,
    workers: int | None = None,
) -> SirMomentsEstimate:
    """Sample mean and variance of the SIR (noise-free regime enforced).

    Infinite samples (possible only when the disk holds fewer nodes than
    antennas, vanishingly rare at the default expected_count) are excluded
    from the moments and reported; a warning marks any exclusion.
    """
    _check_receiver(receiver)
    if params.sigma2 != 0.0:
        raise ValueError("SIR moments are defined for sigma2 = 0")
    if not n_trials >= 2:
        raise ValueError(f"n_trials must be >= 2, got {n_trials}")
    workers = _resolve_workers(workers)
    values = np.empty(n_trials, dtype=np.float64)

    def fill_span(start: int, stop: int) -> None:
        stream = TrialStream(master_seed)
        for i in range(start, stop):
            values[i] = _trial_sinr(stream.at(i), params, expected_count, receiver, pzf_k)

    _run_spans(fill_span, n_trials, workers)
    finite = values[np.isfinite(values)]
    n_infinite = n_trials - finite.shape[0]
    if n_infinite:
        warnings.warn(
            f"excluded {n_infinite} infinite SIR sample(s) from moment estimates",
            stacklevel=2,
        )
    return SirMomentsEstimate(
        mean=float(np.mean(finite)),
        variance=float(np.var(finite, ddof=1)),
        n_trials=n_trials,
        n_infinite=n_infinite,
        master_seed=master_seed,
    )


def conditional_outage_cdf(powers, sigma2: float, L: int, gamma: float) -> float:
    """Outage probability conditioned on a frozen set of received powers.

    Fading-only CDF of the optimum-combiner SINR given interferer powers P_j:

        1 - (sum_{i<L} a_i) / (exp(sigma2*gamma) * prod_j (1 + P_j*gamma))

    where a_i are the leading Taylor coefficients of the denominator,
    assembled from elementary symmetric polynomials of {P_j * gamma} (the
    gamma**i factors are absorbed into the symmetric polynomials).  The
    denominator is accumulated in the log domain so any node count is safe.
    """
    if not (isinstance(L, int) and L >= 1):
        raise ValueError(f"L must be an integer >= 1, got {L}")
    if not sigma2 >= 0.0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    if not gamma >= 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    powers = np.asarray(powers, dtype=np.float64)
    if powers.size and not (powers > 0.0).all():
        raise ValueError("received powers must be positive")
    scaled = powers * gamma
    noise = sigma2 * gamma

    # elementary symmetric polynomials e_0..e_{L-1} of the scaled powers
    sym = [0.0] * L
    sym[0] = 1.0
    cap = min(L - 1, scaled.size)
    for v in scaled.tolist():
        for k in range(cap, 0, -1):
            sym[k] += sym[k - 1] * v

    numerator = 0.0
    for i in range(L):
        a_i = 0.0
        factor = 1.0  # noise**(i-k) / (i-k)! walking k downward from i
        for k in range(i, -1, -1):
            a_i += factor * sym[k]
            factor *= noise / (i - k + 1)
        numerator += a_i

    log_denominator = noise + float(np.sum(np.log1p(scaled)))
    value = -math.expm1(math.log(numerator) - log_denominator)
    return min(1.0, max(0.0, value))
