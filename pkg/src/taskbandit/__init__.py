"""Posterior-driven task selection for batched rollout training.

Per-task Beta posteriors with exponential forgetting, implicit evidence
from cheap success-rate predictors, and Thompson-style batch selection
around a target difficulty. Ships a simulator, performance metrics, and
a CLI for running and comparing experiments.
"""

from .checkpoint import describe_checkpoint, restore_engine, save_checkpoint
from .config import ExperimentConfig, load_config, parse_config_text
from .conjugate import (
    ConjugateState,
    bernoulli_roundtrip,
    bernoulli_state,
    beta_params,
    gaussian_state,
    generic_update,
    posterior_mean_gaussian,
)
from .engine import Engine, StepSummary, posterior_digest
from .errors import CheckpointError, ConfigError, EvidenceError, StateError
from .implicit import (
    CapabilityTracker,
    KernelConfig,
    ReferenceProfile,
    capability_coefficient,
    predict_rate_interpolation,
    predict_rate_kernel,
    predict_rates_interpolation,
    predict_rates_kernel,
    pseudo_counts,
    update_momentum,
)
from .metrics import (
    NOT_REACHED,
    BatchOutcome,
    PerformanceCurve,
    aggregate_curves,
    bsf,
    etr,
    success_rate_histogram,
    ttb,
)
from .posterior import (
    EvidenceBatch,
    PosteriorStore,
    UpdateConfig,
    effective_sample_size,
    fuse_counts,
    posterior_mean,
    posterior_means,
    steady_state_bounds,
    update_posterior,
)
from .rngstreams import stream
from .selector import (
    STRATEGY_NAMES,
    SelectionResult,
    SelectorConfig,
    Strategy,
    make_strategy,
    offline_order,
    offline_select,
    random_select,
    thompson_select,
)
from .simulator import (
    LinearDrift,
    PiecewiseDrift,
    RunConfig,
    RunLog,
    StepRecord,
    SyntheticLearner,
    build_engine,
    build_profile,
    draw_batch_outcomes,
    rollout,
    run_experiment,
    step_learner,
    true_success_rates,
)

__version__ = "0.1.0"

__all__ = [
    "BatchOutcome",
    "CapabilityTracker",
    "CheckpointError",
    "ConfigError",
    "ConjugateState",
    "Engine",
    "EvidenceBatch",
    "EvidenceError",
    "ExperimentConfig",
    "KernelConfig",
    "LinearDrift",
    "NOT_REACHED",
    "PerformanceCurve",
    "PiecewiseDrift",
    "PosteriorStore",
    "ReferenceProfile",
    "RunConfig",
    "RunLog",
    "STRATEGY_NAMES",
    "SelectionResult",
    "SelectorConfig",
    "StateError",
    "StepRecord",
    "StepSummary",
    "Strategy",
    "SyntheticLearner",
    "UpdateConfig",
    "aggregate_curves",
    "bernoulli_roundtrip",
    "bernoulli_state",
    "beta_params",
    "bsf",
    "build_engine",
    "build_profile",
    "capability_coefficient",
    "describe_checkpoint",
    "draw_batch_outcomes",
    "effective_sample_size",
    "etr",
    "fuse_counts",
    "gaussian_state",
    "generic_update",
    "load_config",
    "make_strategy",
    "offline_order",
    "offline_select",
    "parse_config_text",
    "posterior_digest",
    "posterior_mean",
    "posterior_mean_gaussian",
    "posterior_means",
    "predict_rate_interpolation",
    "predict_rate_kernel",
    "predict_rates_interpolation",
    "predict_rates_kernel",
    "pseudo_counts",
    "random_select",
    "restore_engine",
    "rollout",
    "run_experiment",
    "save_checkpoint",
    "steady_state_bounds",
    "step_learner",
    "stream",
    "success_rate_histogram",
    "thompson_select",
    "true_success_rates",
    "ttb",
    "update_momentum",
    "update_posterior",
]
