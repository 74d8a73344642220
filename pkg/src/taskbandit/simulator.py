"""Synthetic learner standing in for the model being finetuned.

The learner has a scalar capability c_t that drifts over the run on a fixed
schedule. True per-task success rates come from one of two links:

* interpolation: p_k = clip(c_t*p_strong[k] + (1-c_t)*p_weak[k] + noise),
  the same functional form the interpolation predictor assumes, so the
  estimator is correctly specified.
* logistic: p_k = sigmoid(slope*(c_t - d_k)) with difficulty
  d_k = 1 - (p_weak[k]+p_strong[k])/2, deliberately outside the predictor's
  model class (misspecification stress mode). Noise is not applied here.

A configurable share of tasks is pinned to p=0 and p=1 (never/always solved)
after the link, with profile entries (0,0)/(1,1) for generated pools, to
reproduce the unsolvable and mastered bands a real task mix shows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .engine import Engine
from .errors import ConfigError
from .implicit import CapabilityTracker, KernelConfig, ReferenceProfile
from .posterior import PosteriorStore, UpdateConfig
from .rngstreams import stream
from .selector import SelectorConfig, Strategy

__all__ = [
    "LinearDrift",
    "PiecewiseDrift",
    "SyntheticLearner",
    "RunConfig",
    "StepRecord",
    "RunLog",
    "rollout",
    "draw_batch_outcomes",
    "step_learner",
    "true_success_rates",
    "build_profile",
    "build_engine",
    "run_experiment",
]


@dataclass(frozen=True)
class LinearDrift:
    start: float
    end: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigError("drift steps must be >= 1")


@dataclass(frozen=True)
class PiecewiseDrift:
    """values[i] applies while t < breaks[i]; the last value after all breaks."""

    breaks: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.breaks) + 1:
            raise ConfigError("piecewise drift needs one more value than breaks")
        if any(b2 <= b1 for b1, b2 in zip(self.breaks, self.breaks[1:])):
            raise ConfigError("piecewise breaks must be strictly increasing")


@dataclass
class SyntheticLearner:
    capability: float
    drift: LinearDrift | PiecewiseDrift
    link: str = "interpolation"
    noise_sd: float = 0.0
    slope: float = 6.0

    def __post_init__(self) -> None:
        if self.link not in ("interpolation", "logistic"):
            raise ConfigError(f"unknown link {self.link!r}")
        if self.noise_sd < 0.0:
            raise ConfigError("noise_sd must be >= 0")


def step_learner(state: SyntheticLearner, t: int) -> float:
    """Capability at step t per the drift schedule."""
    drift = state.drift
    if isinstance(drift, LinearDrift):
        return drift.start + (drift.end - drift.start) * t / drift.steps
    idx = int(np.searchsorted(drift.breaks, t, side="right"))
    return drift.values[idx]


def true_success_rates(
    learner: SyntheticLearner,
    profile: ReferenceProfile,
    capability: float,
    pinned_zero: int,
    pinned_one: int,
    noise_rng: np.random.Generator | None,
) -> np.ndarray:
    """Ground-truth success rates for every task at one step."""
    if learner.link == "interpolation":
        raw = capability * profile.p_strong + (1.0 - capability) * profile.p_weak
        if learner.noise_sd > 0.0:
            if noise_rng is None:
                raise ConfigError("noise_sd > 0 needs a noise stream")
            raw = raw + noise_rng.normal(0.0, learner.noise_sd, profile.task_count)
        rates = np.clip(raw, 0.0, 1.0)
    else:
        difficulty = 1.0 - (profile.p_weak + profile.p_strong) / 2.0
        rates = 1.0 / (1.0 + np.exp(-learner.slope * (capability - difficulty)))
    # pins hold exactly regardless of link or noise
    rates[:pinned_zero] = 0.0
    rates[pinned_zero : pinned_zero + pinned_one] = 1.0
    return rates


def rollout(p_true: float, n: int, rng: np.random.Generator) -> tuple[int, int]:
    """n Bernoulli(p_true) rollouts: (successes, failures)."""
    if not 0.0 <= p_true <= 1.0:
        raise ValueError(f"p_true must lie in [0, 1], got {p_true}")
    s = int(rng.binomial(n, p_true))
    return s, n - s


def draw_batch_outcomes(
    p_true_selected: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Success counts for a whole batch in selection order, one stream draw."""
    return rng.binomial(n, p_true_selected)


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulated run needs, fully resolved."""

    task_count: int
    steps: int
    batch_size: int
    rollouts: int
    strategy_name: str
    mode: str
    forget: float
    mix: float
    sample_posterior: bool
    p_star: float
    seed: int
    plugin: str = "interpolation"
    gamma: float = 0.9
    epsilon: float = 1e-6
    temperature: float = 1.0
    embeddings: np.ndarray | None = None
    profile_weak: np.ndarray | None = None  # None: generate from the seed
    profile_strong: np.ndarray | None = None
    pinned_zero_frac: float = 0.3
    pinned_one_frac: float = 0.2
    link: str = "interpolation"
    drift: LinearDrift | PiecewiseDrift | None = None
    noise_sd: float = 0.0
    slope: float = 6.0
    alpha_base: float = 1.0
    beta_base: float = 1.0
    warm_start_weight: float = 0.0
    warm_start_mu: float = 0.5

    def __post_init__(self) -> None:
        if self.task_count < 1 or self.steps < 0:
            raise ConfigError("task_count must be >= 1 and steps >= 0")
        if not 1 <= self.batch_size <= self.task_count:
            raise ConfigError("batch_size must lie in [1, task_count]")
        if self.pinned_zero_frac < 0 or self.pinned_one_frac < 0:
            raise ConfigError("pinned fractions must be >= 0")
        if self.pinned_zero_frac + self.pinned_one_frac > 1.0:
            raise ConfigError("pinned fractions must sum to <= 1")
        if self.plugin not in ("interpolation", "kernel"):
            raise ConfigError(f"unknown plugin {self.plugin!r}")
        if self.plugin == "kernel" and self.embeddings is None:
            raise ConfigError("kernel plugin configured without embeddings")
        if (self.profile_weak is None) != (self.profile_strong is None):
            raise ConfigError("profile columns must be given together")
        if self.profile_weak is not None and (
            self.pinned_zero_frac != 0.0 or self.pinned_one_frac != 0.0
        ):
            raise ConfigError("pinned fractions apply to generated profiles only")
        if self.warm_start_weight < 0.0:
            raise ConfigError("warm_start_weight must be >= 0")
        if self.warm_start_weight > 0.0 and self.plugin != "interpolation":
            raise ConfigError("warm start needs the interpolation plugin")

    @property
    def pinned_zero_count(self) -> int:
        return int(self.pinned_zero_frac * self.task_count)

    @property
    def pinned_one_count(self) -> int:
        return int(self.pinned_one_frac * self.task_count)


@dataclass(frozen=True)
class StepRecord:
    step: int
    selected: np.ndarray
    successes: np.ndarray
    failures: np.ndarray
    mu_momentum: float | None
    posterior_digest: str
    true_rates: np.ndarray  # of the selected tasks, in selection order


@dataclass
class RunLog:
    rollouts: int
    records: list[StepRecord] = field(default_factory=list)


def build_profile(cfg: RunConfig) -> ReferenceProfile:
    """The run's reference profile: loaded columns, or drawn from the seed.

    Generated entries are independent uniforms swapped so weak <= strong;
    pinned tasks get (0,0) and (1,1) so the interpolation predictor is exact
    on them.
    """
    if cfg.profile_weak is not None:
        return ReferenceProfile(cfg.profile_weak, cfg.profile_strong)
    rng = stream(cfg.seed, "profile", 0)
    a = rng.random(cfg.task_count)
    b = rng.random(cfg.task_count)
    weak = np.minimum(a, b)
    strong = np.maximum(a, b)
    z, o = cfg.pinned_zero_count, cfg.pinned_one_count
    weak[:z] = 0.0
    strong[:z] = 0.0
    weak[z : z + o] = 1.0
    strong[z : z + o] = 1.0
    return ReferenceProfile(weak, strong)


def _initial_store(cfg: RunConfig, profile: ReferenceProfile) -> PosteriorStore:
    count = cfg.task_count
    alpha0 = np.full(count, cfg.alpha_base)
    beta0 = np.full(count, cfg.beta_base)
    if cfg.warm_start_weight > 0.0:
        mu = cfg.warm_start_mu
        predicted = np.clip(
            mu * profile.p_strong + (1.0 - mu) * profile.p_weak, 0.0, 1.0
        )
        alpha0 = 1.0 + predicted * cfg.rollouts * cfg.warm_start_weight
        beta0 = 1.0 + (1.0 - predicted) * cfg.rollouts * cfg.warm_start_weight
    return PosteriorStore(alpha0.copy(), beta0.copy(), alpha0, beta0)


def build_engine(cfg: RunConfig, profile: ReferenceProfile | None = None) -> Engine:
    if profile is None:
        profile = build_profile(cfg)
    strategy = Strategy(
        name=cfg.strategy_name,
        mode=cfg.mode,
        update=UpdateConfig(forget=cfg.forget, mix=cfg.mix, rollouts=cfg.rollouts),
        selector=SelectorConfig(
            p_star=cfg.p_star,
            batch_size=cfg.batch_size,
            sample_posterior=cfg.sample_posterior,
            seed=cfg.seed,
        ),
        plugin=cfg.plugin,
    )
    kernel = None
    if cfg.plugin == "kernel":
        kernel = KernelConfig(embeddings=cfg.embeddings, temperature=cfg.temperature)
    return Engine(
        strategy=strategy,
        store=_initial_store(cfg, profile),
        seed=cfg.seed,
        profile=profile,
        kernel=kernel,
        tracker=CapabilityTracker(gamma=cfg.gamma, epsilon=cfg.epsilon),
    )


def _learner(cfg: RunConfig) -> SyntheticLearner:
    drift = cfg.drift if cfg.drift is not None else LinearDrift(0.0, 1.0, max(cfg.steps, 1))
    return SyntheticLearner(
        capability=step_learner_start(drift),
        drift=drift,
        link=cfg.link,
        noise_sd=cfg.noise_sd,
        slope=cfg.slope,
    )


def step_learner_start(drift: LinearDrift | PiecewiseDrift) -> float:
    if isinstance(drift, LinearDrift):
        return drift.start
    return drift.values[0]


ProbeFn = Callable[[StepRecord, np.ndarray, np.ndarray], None]


def run_experiment(
    cfg: RunConfig,
    probe: ProbeFn | None = None,
    engine: Engine | None = None,
) -> RunLog:
    """Run (or, given a restored engine, finish) one simulated experiment.

    Per step: select a batch, roll the learner's true rates, draw binomial
    outcomes, report them to the engine, and record the step. The probe, when
    given, sees each record plus the full prediction and true-rate vectors;
    it must not mutate them.
    """
    profile = build_profile(cfg)
    if engine is None:
        engine = build_engine(cfg, profile)
    learner = _learner(cfg)
    z, o = cfg.pinned_zero_count, cfg.pinned_one_count

    log = RunLog(rollouts=cfg.rollouts)
    for t in range(engine.step, cfg.steps):
        selection = engine.select()
        learner.capability = step_learner(learner, t)
        noise_rng = stream(cfg.seed, "noise", t) if cfg.noise_sd > 0.0 else None
        rates_all = true_success_rates(
            learner, profile, learner.capability, z, o, noise_rng
        )
        succ = draw_batch_outcomes(
            rates_all[selection.task_ids], cfg.rollouts, stream(cfg.seed, "rollout", t)
        )
        outcomes = {
            int(k): (int(s), cfg.rollouts - int(s))
            for k, s in zip(selection.task_ids, succ)
        }
        summary = engine.report(outcomes)
        record = StepRecord(
            step=t,
            selected=selection.task_ids.copy(),
            successes=np.asarray(succ, dtype=np.int64),
            failures=cfg.rollouts - np.asarray(succ, dtype=np.int64),
            mu_momentum=summary.mu_momentum,
            posterior_digest=engine.digest(),
            true_rates=rates_all[selection.task_ids].copy(),
        )
        log.records.append(record)
        if probe is not None:
            probe(record, engine.last_predictions, rates_all)
    return log
