"""Robust confidence intervals under unknown Huber contamination."""

from .common import (
    ConfidenceInterval,
    SearchSizeWarning,
    SmallnessConditionWarning,
)
from .dist import (
    FinitePmf,
    SampleSet,
    bernstein_dev,
    binom_cdf,
    binom_pmf,
    binom_pmf_array,
    binom_sf,
    binomial_finite_pmf,
    dkw_halfwidth,
    empirical_cdf,
    pois_cdf,
    pois_pmf,
    pois_sf,
    poisson_finite_pmf,
    tv_distance,
)
from .binomial import (
    RobustBinomialCI,
    RobustCIConfig,
    TestQuantities,
    boundary_left,
    boundary_right,
    epsilon_grid,
    lower_quantities,
    phi_minus,
    phi_plus,
    psi_hat_minus,
    psi_hat_plus,
    rate_ell,
    rbar_closed_form,
    robust_ci,
    upper_quantities,
)
from .poisson import (
    PoisTestQuantities,
    RobustPoissonCI,
    lambda_max_hat,
    lower_quantities_pois,
    phi_minus_pois,
    phi_plus_pois,
    psi_hat_minus_pois,
    psi_hat_plus_pois,
    rate_ell_pois,
    robust_ci_pois,
    upper_quantities_pois,
)
from .estimators import (
    EstimatorConfig,
    adaptive_estimator,
    bernoulli_ci,
    known_eps_ci,
    p_hat_g,
    p_hat_l,
    p_hat_s,
    solve_absdev_interval,
    trimmed_mean,
)
from .adversary import (
    ConstructionResult,
    ContaminatedMixture,
    pois_q0_exact,
    pois_q1_exact,
    q0_exact_match,
    q0_truncated,
    q1_exact_match,
    tv_product_bound,
)
from .ergraph import (
    SubsetSearchConfig,
    SubsetSearchResult,
    er_conservative_ci,
    er_estimate,
    find_s_hat,
    read_edge_list,
    sample_er,
    sample_node_contaminated,
    sample_sbm,
    u_norm,
    write_edge_list,
)
from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    emit_csv,
    run_experiment,
    sample_contaminated,
    stream_rng,
)

__version__ = "0.1.0"
