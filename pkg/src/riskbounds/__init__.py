"""Lower bounds on Bayesian estimation risk via information measures.

The package computes Renyi/Sibson/Hellinger/hockey-stick dependence
measures, turns them into estimator-independent risk lower bounds with
optimized free parameters, refines them under noisy observations through
strong data-processing constants, and validates everything against
Monte-Carlo risk oracles in four worked estimation settings.
"""

from .distributions import (
    DiscreteDistribution,
    DiscreteJoint,
    DivergenceKind,
    DivergenceSpec,
    MarkovKernel,
    MixedJoint,
)
from .measures import (
    chi_square,
    divergence_from_independence,
    e_gamma_zeta,
    hellinger_p,
    hockey_stick,
    kl_divergence,
    maximal_leakage_discrete,
    mutual_information,
    renyi_divergence,
    sibson_mi_discrete,
)
from .bounds import (
    BoundResult,
    PhiSpec,
    RhoObjective,
    SmallBallFn,
    hellinger_bound,
    hellinger_phi,
    hockey_stick_bound,
    hockey_stick_phi,
    maximize_rho,
    mi_baseline_bound,
    ml_bound,
    optimize_bound,
    phi_bound_decreasing,
    phi_bound_increasing,
    sdpi_bound,
    sibson_bound,
)
from .sdpi import (
    dobrushin_coefficient,
    eta_estimate_by_sampling,
    eta_hellinger_bsc_upper,
    eta_operator_convex_bsc,
    ldp_contraction_bound,
    renyi_sdpi_ratio,
    tensorize_eta,
)
from .models import (
    BernoulliUniformModel,
    GaussianModel,
    HideAndSeekModel,
    NoisyBernoulliModel,
)
from .oracle import RiskEstimate, brute_force_divergence, mc_risk

__version__ = "0.1.0"
