"""Batch selection: Thompson sampling toward a target rate, plus baselines.

Thompson selection draws one rate per task from its Beta posterior (or takes
the posterior mean when sampling is off) and keeps the B tasks whose draws
land nearest the target p_star, ties broken by ascending task id. Baselines:
uniform random batches, and a fixed easy-to-hard ordering served round-robin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .implicit import ReferenceProfile
from .posterior import PosteriorStore, UpdateConfig, posterior_means

__all__ = [
    "SelectorConfig",
    "SelectionResult",
    "Strategy",
    "STRATEGY_NAMES",
    "thompson_select",
    "random_select",
    "offline_select",
    "offline_order",
    "make_strategy",
]

STRATEGY_NAMES = ("random", "offline", "bots", "bots-mopps", "bots-dots")


@dataclass(frozen=True)
class SelectorConfig:
    p_star: float
    batch_size: int
    sample_posterior: bool
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.p_star < 1.0:
            raise ValueError(f"p_star must lie in (0, 1), got {self.p_star}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass(frozen=True)
class SelectionResult:
    """Chosen task ids and the per-task rates that ranked them.

    rates are the Thompson draws (or means); NaN for selectors that do not
    consult the posterior.
    """

    task_ids: np.ndarray
    sampled_rates: np.ndarray

    def __post_init__(self) -> None:
        ids = np.asarray(self.task_ids, dtype=np.intp)
        rates = np.asarray(self.sampled_rates, dtype=np.float64)
        object.__setattr__(self, "task_ids", ids)
        object.__setattr__(self, "sampled_rates", rates)
        if ids.shape != rates.shape or ids.ndim != 1:
            raise ValueError("ids and rates must be 1-d and equal length")
        if np.unique(ids).size != ids.size:
            raise ValueError("selected ids must be distinct")


def thompson_select(
    store: PosteriorStore, cfg: SelectorConfig, rng: np.random.Generator
) -> SelectionResult:
    """Pick the B tasks whose sampled rates land nearest p_star."""
    count = store.task_count
    if cfg.batch_size > count:
        raise ValueError(f"batch_size {cfg.batch_size} exceeds task count {count}")
    if cfg.sample_posterior:
        rates = rng.beta(store.alpha, store.beta)
    else:
        rates = posterior_means(store)
    deviation = np.abs(rates - cfg.p_star)
    # lexsort: primary key deviation, secondary ascending id
    order = np.lexsort((np.arange(count), deviation))
    chosen = order[: cfg.batch_size]
    return SelectionResult(chosen, rates[chosen])


def random_select(
    task_count: int, batch_size: int, rng: np.random.Generator
) -> SelectionResult:
    """Uniform batch of distinct ids; rates are NaN (posterior unused)."""
    if batch_size > task_count:
        raise ValueError(f"batch_size {batch_size} exceeds task count {task_count}")
    chosen = rng.choice(task_count, size=batch_size, replace=False)
    return SelectionResult(chosen, np.full(batch_size, np.nan))


def offline_order(profile: ReferenceProfile) -> np.ndarray:
    """Fixed easy-to-hard serving order.

    Descending weak-model rate, ties by descending strong-model rate, then
    ascending id.
    """
    ids = np.arange(profile.task_count)
    return np.lexsort((ids, -profile.p_strong, -profile.p_weak))


def offline_select(
    profile: ReferenceProfile, cursor: int, batch_size: int
) -> SelectionResult:
    """Serve the next batch_size tasks of the fixed order, wrapping at the end."""
    count = profile.task_count
    if batch_size > count:
        raise ValueError(f"batch_size {batch_size} exceeds task count {count}")
    order = offline_order(profile)
    positions = (cursor + np.arange(batch_size)) % count
    chosen = order[positions]
    return SelectionResult(chosen, np.full(batch_size, np.nan))


@dataclass(frozen=True)
class Strategy:
    """Named bundle of update config, selector config, and predictor choice."""

    name: str
    mode: str  # thompson | random | offline
    update: UpdateConfig
    selector: SelectorConfig
    plugin: str  # interpolation | kernel


def make_strategy(
    name: str,
    *,
    batch_size: int = 64,
    seed: int = 0,
    rollouts: int = 16,
    p_star: float = 0.5,
    plugin: str = "interpolation",
) -> Strategy:
    """Build one of the named strategies.

    bots: forget 0.1, mix 0.1, sampling on. bots-mopps: forget 0, mix 0,
    sampling on (pure cumulative counting). bots-dots: forget 1, mix 1,
    sampling off (memoryless, mean-ranked). random and offline ignore the
    posterior for selection but carry the default update config so their
    belief state stays comparable in logs.
    """
    presets = {
        "random": ("random", 0.1, 0.1, True),
        "offline": ("offline", 0.1, 0.1, True),
        "bots": ("thompson", 0.1, 0.1, True),
        "bots-mopps": ("thompson", 0.0, 0.0, True),
        "bots-dots": ("thompson", 1.0, 1.0, False),
    }
    if name not in presets:
        raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGY_NAMES}")
    mode, forget, mix, sample = presets[name]
    return Strategy(
        name=name,
        mode=mode,
        update=UpdateConfig(forget=forget, mix=mix, rollouts=rollouts),
        selector=SelectorConfig(
            p_star=p_star, batch_size=batch_size, sample_posterior=sample, seed=seed
        ),
        plugin=plugin,
    )
