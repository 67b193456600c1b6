"""Exact, asymptotic and simulated tail probabilities for sample quantiles.

The exact finite-n law of a sample quantile reduces to a binomial tail; this
package computes that oracle in log space and confronts it with the sharp
large-deviation expansion, Cramer-type normal-tail ratios, moderate/large
deviation rates, and reproducible Monte Carlo.
"""

from .backend import active_backend, set_backend
from .distributions import (
    FAMILIES,
    DistributionSpec,
    RegularityReport,
    cdf,
    format_distribution,
    parse_distribution,
    pdf,
    pdf_prime,
    quantile,
    support,
    validate_regularity,
)
from .deviations import (
    DeviationExpansion,
    IdentityReport,
    MDPRate,
    bahadur_rao_log,
    bernoulli_kl,
    bernoulli_lower_log_mgf,
    bernoulli_upper_log_mgf,
    cramer_log_ratio,
    fenchel_legendre_numeric,
    ldp_rate_star,
    mdp_rate,
    normal_tail,
    rate_lambda,
    sigma_p,
    tilt_tau,
    verification_battery,
    verify_rate_identity,
)
from .diagnostics import (
    BerryEsseenReport,
    CramerEnvelopeFit,
    ExponentFit,
    PnEnvelopeFit,
    SweepTable,
    berry_esseen_sup,
    berry_esseen_sweep,
    convergence_sweep,
    cramer_envelope_fit,
    fit_exponent,
    mdp_sweep,
    parse_grid,
    pn_sweep,
)
from .exact import (
    LogProbability,
    QuantileProblem,
    binomial_tail_log,
    exact_tail,
    exact_tail_normalized,
    normalized_offset,
    quantile_rank,
    sample_quantile_cdf,
    sample_quantile_from_data,
)
from .montecarlo import (
    VALIDATION_BATTERY,
    EmpiricalTail,
    RemainderSummary,
    SimConfig,
    bahadur_remainder_study,
    clopper_pearson,
    empirical_tail,
    run_validation_battery,
    simulate_quantiles,
)

__version__ = "0.1.0"
