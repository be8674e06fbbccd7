"""Optimum combining in a Poisson field of Rayleigh-faded interferers.

Exact closed forms for the post-combining SINR outage, ALOHA contention
optimization, and a from-scratch Monte Carlo simulator of the physical model
to validate them.
"""

from .analytic import (
    SystemParams,
    array_gain,
    delta_const,
    gamma_from_beta,
    outage_cdf,
    outage_interference_limited,
    outage_noise_limited,
    sir_mean,
    sir_variance,
    throughput_density,
)
from .contention import (
    BracketViolation,
    ContentionOptimum,
    contention_optimum,
    g_of_l,
    lambda_max,
    q_poly,
    q_poly_scaled,
    throughput_grid_max,
    throughput_max,
)
from .linalg import SINGULAR, SingularIndication, cholesky, project_out, quadratic_form_inverse, solve
from .simulate import (
    ChannelDraw,
    NetworkRealization,
    OutageEstimate,
    SinrSample,
    SirMomentsEstimate,
    TrialStream,
    build_covariance,
    combiner_sinr,
    combiner_weights,
    conditional_outage_cdf,
    covariance_from_powers,
    default_pzf_k,
    draw_channels,
    estimate_outage,
    estimate_outage_conditional,
    estimate_sir_moments,
    oc_sinr,
    receiver_label,
    sample_ppp,
    sinr_sample,
    trial_generator,
)

__version__ = "0.1.0"
