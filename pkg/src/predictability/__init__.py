"""Predictability of performance in observable Markov models."""

from .bounds import (
    BoundReport,
    bound_report,
    predictability_ub_chain_tv,
    predictability_ub_spectral_full,
    predictability_ub_spectral_gap,
    r_statistic,
)
from .dist import (
    DiscretePmf,
    NbConvention,
    convolve,
    cross_entropy_divergence,
    mixture,
    negative_binomial_pmf,
    tv_distance,
)
from .errors import (
    AbsoluteContinuityViolation,
    ConfigError,
    HorizonExceedsScan,
    InvalidParameter,
    InvalidPmf,
    NotReversible,
    NotStochastic,
    NotSurjective,
    Periodic,
    PredictabilityError,
    Reducible,
    UnstableQueue,
    ValidationFailure,
)
from .geoqueue import (
    GeoQueueParams,
    geo_blocking_predictability,
    geo_observable_model,
    geo_predictability_approx,
    geo_sojourn_posterior,
    geo_stationary,
    geo_transient,
    geo_transition_matrix,
)
from .markov import (
    MarkovChain,
    SpectralDecomposition,
    build_chain,
    chain_tv,
    check_reversibility,
    l_step,
    mixing_tv_bound_full,
    mixing_tv_bound_gap,
    spectral_decompose,
)
from .montecarlo import (
    SimConfig,
    empirical_blocking_forecast,
    sample_forecast_empirical,
    simulate_geo_queue,
)
from .multihop import (
    TandemSystem,
    tandem_forecast,
    tandem_marginal,
    tandem_predictability,
    tandem_predictability_ub,
)
from .omm import (
    AggregationMap,
    ObservableModel,
    aggregate,
    ce_predictability,
    delayed_predictability,
    epsilon_horizon,
    forecast,
    marginal,
    predictability,
    predictability_sum,
    worst_case_horizon,
)
from .randomwalk import RandomWalkParams, cqi_observable_model, lazy_walk_chain

__version__ = "0.1.0"

__all__ = [
    "AbsoluteContinuityViolation",
    "aggregate",
    "AggregationMap",
    "bound_report",
    "BoundReport",
    "build_chain",
    "ce_predictability",
    "chain_tv",
    "check_reversibility",
    "ConfigError",
    "convolve",
    "cqi_observable_model",
    "cross_entropy_divergence",
    "delayed_predictability",
    "DiscretePmf",
    "empirical_blocking_forecast",
    "epsilon_horizon",
    "forecast",
    "geo_blocking_predictability",
    "geo_observable_model",
    "geo_predictability_approx",
    "geo_sojourn_posterior",
    "geo_stationary",
    "geo_transient",
    "geo_transition_matrix",
    "GeoQueueParams",
    "HorizonExceedsScan",
    "InvalidParameter",
    "InvalidPmf",
    "l_step",
    "lazy_walk_chain",
    "marginal",
    "MarkovChain",
    "mixing_tv_bound_full",
    "mixing_tv_bound_gap",
    "mixture",
    "NbConvention",
    "negative_binomial_pmf",
    "NotReversible",
    "NotStochastic",
    "NotSurjective",
    "ObservableModel",
    "Periodic",
    "predictability",
    "predictability_sum",
    "predictability_ub_chain_tv",
    "predictability_ub_spectral_full",
    "predictability_ub_spectral_gap",
    "PredictabilityError",
    "r_statistic",
    "RandomWalkParams",
    "Reducible",
    "sample_forecast_empirical",
    "SimConfig",
    "simulate_geo_queue",
    "spectral_decompose",
    "SpectralDecomposition",
    "tandem_forecast",
    "tandem_marginal",
    "tandem_predictability",
    "tandem_predictability_ub",
    "TandemSystem",
    "tv_distance",
    "UnstableQueue",
    "ValidationFailure",
    "worst_case_horizon",
]

