"""Volterra and Cesaro operators on finite Muntz polynomials."""

from .core import (
    DomainError,
    ExponentRule,
    MuntzPoly,
    antiderivative,
    coefficient,
    evaluate,
    integral,
    linear_combine,
    multiply,
    value_at_zero,
)
from .norms import NormResult, RootList, isolate_zeros, l1_norm, normalize_l1, sup_norm

from .operators import (
    FiniteRankSpec,
    Weight,
    cesaro,
    difference,
    division_q,
    erdos_functional,
    finite_rank_apply,
    get_operator,
    nuclear_series,
    t_rho_apply,
    volterra,
    weighted_hq,
)
from .essential import (
    BlockSpec,
    UnitBallSampler,
    WitnessFamily,
    block_subsequence,
    composition_demo,
    discontinuity_height,
    essential_lower_bound,
    estimate_N_epsilon,
    hq_approx_gap,
    pointwise_limit,
    sampled_operator_gap,
)
from .bernstein import (
    abel_bound_check,
    bernstein_estimate,
    inner_inf,
    newman_inequality_stats,
    newman_sequence,
)
from .experiments import ExperimentConfig, RunRecord, emit_report, parse_config, run_experiment

__version__ = "0.1.0"
