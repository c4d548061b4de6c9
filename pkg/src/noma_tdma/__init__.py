"""Two-user downlink NOMA vs. TDMA: rate regions, event classification, and
event probabilities by closed form, quadrature, and Monte Carlo."""

from .regions import (
    ChannelPair,
    PowerSplit,
    TimeSplit,
    RatePair,
    InfeasibleSplitError,
    single_user_rates,
    noma_rate_pair,
    tdma_rate_pair,
    noma_boundary,
    tdma_boundary,
    capacity_boundary,
    noma_boundary_slope,
    noma_arc_z_max,
    region_boundary_samples,
)
from .events import (
    EventId,
    ComparisonOutcome,
    DegenerateSplitError,
    ClassificationError,
    classify_full,
    classify_reduced,
    classify_many,
    epsilon2_threshold,
)
from .order_stats import (
    PairingConfig,
    AnalyticConstants,
    constants_for,
    joint_pdf,
    marginal_cdf_n,
    sample_pair,
    sample_pairs,
)
from .analytic import (
    EventProbabilities,
    InconsistencyError,
    ConvergenceError,
    p_eps1_closed,
    p_eps2_closed,
    p_eps3_closed,
    p_eps4_closed,
    p_eps2_special,
    optimal_a2_special,
    strong_user_tail,
    event_probabilities_closed,
)
from .quadrature import p_event_quadrature, event_probabilities_quadrature
from .montecarlo import (
    McConfig,
    AverageRates,
    estimate_event_probs,
    estimate_average_rates,
    binomial_interval,
)

__version__ = "0.1.0"
