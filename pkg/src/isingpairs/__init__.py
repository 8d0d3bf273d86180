"""Lattice Ising model simulation and interacting-pair recovery."""

from .bounds import (
    BoundReport,
    bernstein,
    coupling_bound,
    misid_bound_finite,
    misid_bound_infinite,
    v_analytic_bounds,
)
from .errors import CapacityError, CoalescenceTimeoutError, DobrushinViolationError
from .estimator import (
    NeighborhoodEstimate,
    ThresholdSchedule,
    empirical_conditional,
    empirical_D,
    empirical_prob,
    estimate_neighborhood,
    estimate_report,
    scale_L,
    threshold,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    classify_trial,
    load_config,
    mann_kendall,
    result_csv,
    run_experiment,
    truth_set,
    wilson_interval,
    write_csv,
)
from .oracle import (
    ExactModel,
    exact_conditional,
    exact_D,
    exact_D_max,
    exact_distribution,
    exact_marginal,
    exact_V,
    exact_v,
)
from .potential import (
    Box,
    PairwisePotential,
    ball_sites,
    dobrushin_coefficient,
    interaction_neighborhood,
    load_potential,
    max_norm,
    random_interaction_graph,
    save_potential,
    tail_sum,
    truncate,
)
from .sampler import (
    CouplingTrace,
    Sample,
    SpinConfiguration,
    coupled_gibbs_sample,
    coupled_truncation_chains,
    coupling_masses,
    generate_sample,
    load_sample,
    local_spec,
    save_sample,
)

__version__ = "0.1.0"
