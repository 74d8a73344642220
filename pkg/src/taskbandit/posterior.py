"""Per-task Beta belief state under a forgetting, evidence-mixing update.

Each task k carries a Beta(alpha[k], beta[k]) posterior over its success
probability. One step of the update, applied to ALL tasks every step, is

    alpha' = (1-forget)*alpha + forget*alpha_base + (1-mix)*s + mix*s_pseudo
    beta'  = (1-forget)*beta  + forget*beta_base  + (1-mix)*f + mix*f_pseudo

where (s, f) are explicit success/failure counts out of n rollouts for tasks
evaluated this step (zero otherwise), and (s_pseudo, f_pseudo) are pseudo
counts: equal to (s, f) for evaluated tasks, and (p*n, (1-p)*n) from a
predicted rate p for the rest. ``forget`` discounts old evidence toward the
base prior each step; ``mix`` tempers how much predicted evidence counts
against observed evidence.

The fused distribution is itself exactly a Beta: raising the old posterior,
the base prior, and the two likelihood terms to powers (1-forget), forget,
(1-mix), mix and multiplying them collapses, by exponent collection, to
Beta(alpha', beta') with the parameters above. The effective sample size
n_t = alpha + beta therefore follows a scalar recurrence whose limits are
computable in closed form (see ``steady_state_bounds``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError, EvidenceError

__all__ = [
    "UpdateConfig",
    "PosteriorStore",
    "EvidenceBatch",
    "fuse_counts",
    "update_posterior",
    "effective_sample_size",
    "steady_state_bounds",
    "posterior_mean",
]


@dataclass(frozen=True)
class UpdateConfig:
    """Knobs of the one-step update.

    forget: per-step discount toward the base prior, in [0, 1].
    mix: weight of predicted (pseudo) evidence against observed, in [0, 1].
    rollouts: number of rollouts n drawn per selected task.
    """

    forget: float
    mix: float
    rollouts: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.forget <= 1.0:
            raise ConfigError(f"forget must lie in [0, 1], got {self.forget}")
        if not 0.0 <= self.mix <= 1.0:
            raise ConfigError(f"mix must lie in [0, 1], got {self.mix}")
        if self.rollouts < 1:
            raise ConfigError(f"rollouts must be >= 1, got {self.rollouts}")


@dataclass(frozen=True)
class PosteriorStore:
    """Beta parameters per task plus the base prior they decay toward.

    Arrays are float64 and never mutated in place; updates return a new store,
    so a snapshot can be handed to another thread safely.
    """

    alpha: np.ndarray
    beta: np.ndarray
    alpha_base: np.ndarray
    beta_base: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("alpha", "beta", "alpha_base", "beta_base"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            arrays[name] = arr
        n = arrays["alpha"].shape
        if any(a.shape != n or a.ndim != 1 for a in arrays.values()):
            raise ConfigError("posterior arrays must be 1-d and equal length")
        for name, arr in arrays.items():
            if not np.all(arr > 0.0):
                raise ConfigError(f"{name} must be strictly positive everywhere")

    @property
    def task_count(self) -> int:
        return self.alpha.shape[0]

    @classmethod
    def uniform(cls, task_count: int) -> "PosteriorStore":
        """Fresh store with Beta(1, 1) priors for every task."""
        ones = np.ones(task_count, dtype=np.float64)
        return cls(ones.copy(), ones.copy(), ones.copy(), ones.copy())


@dataclass(frozen=True)
class EvidenceBatch:
    """Explicit rollout outcomes for the tasks evaluated at one step."""

    entries: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for task_id, (s, f) in self.entries.items():
            if s < 0 or f < 0:
                raise EvidenceError(
                    f"task {task_id}: counts must be non-negative, got ({s}, {f})"
                )


def fuse_counts(
    alpha: np.ndarray,
    beta: np.ndarray,
    alpha_base: np.ndarray,
    beta_base: np.ndarray,
    succ: np.ndarray,
    fail: np.ndarray,
    succ_pseudo: np.ndarray,
    fail_pseudo: np.ndarray,
    forget: float,
    mix: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One raw fusion step on arrays; no validation, no tolerance."""
    keep = 1.0 - forget
    observed = 1.0 - mix
    alpha_new = keep * alpha + forget * alpha_base + observed * succ + mix * succ_pseudo
    beta_new = keep * beta + forget * beta_base + observed * fail + mix * fail_pseudo
    return alpha_new, beta_new


def update_posterior(
    store: PosteriorStore,
    explicit: EvidenceBatch,
    implicit_rates: Mapping[int, float],
    cfg: UpdateConfig,
) -> PosteriorStore:
    """Apply one update step to every task and return the new store.

    Evaluated tasks contribute their observed counts through both the explicit
    and the pseudo term; unevaluated tasks contribute only pseudo counts built
    from ``implicit_rates``, which must cover every one of them.
    """
    count = store.task_count
    n = float(cfg.rollouts)

    succ = np.zeros(count, dtype=np.float64)
    fail = np.zeros(count, dtype=np.float64)
    evaluated = np.zeros(count, dtype=bool)
    for task_id, (s, f) in explicit.entries.items():
        if not 0 <= task_id < count:
            raise EvidenceError(f"task id {task_id} outside [0, {count})")
        if s + f != cfg.rollouts:
            raise EvidenceError(
                f"task {task_id}: s + f must equal {cfg.rollouts}, got {s} + {f}"
            )
        succ[task_id] = s
        fail[task_id] = f
        evaluated[task_id] = True

    succ_pseudo = succ.copy()
    fail_pseudo = fail.copy()
    for task_id in range(count):
        if evaluated[task_id]:
            continue
        try:
            rate = implicit_rates[task_id]
        except KeyError:
            raise ConfigError(
                f"no implicit prediction for unevaluated task {task_id}"
            ) from None
        if not 0.0 <= rate <= 1.0:
            raise ConfigError(
                f"implicit rate for task {task_id} outside [0, 1]: {rate}"
            )
        s_pseudo = rate * n
        succ_pseudo[task_id] = s_pseudo
        fail_pseudo[task_id] = n - s_pseudo

    alpha_new, beta_new = fuse_counts(
        store.alpha,
        store.beta,
        store.alpha_base,
        store.beta_base,
        succ,
        fail,
        succ_pseudo,
        fail_pseudo,
        cfg.forget,
        cfg.mix,
    )
    return PosteriorStore(alpha_new, beta_new, store.alpha_base, store.beta_base)


def _check_index(store: PosteriorStore, k: int) -> None:
    if not 0 <= k < store.task_count:
        raise IndexError(f"task id {k} outside [0, {store.task_count})")


def effective_sample_size(store: PosteriorStore, k: int) -> float:
    """alpha[k] + beta[k]: the posterior's equivalent observation count."""
    _check_index(store, k)
    return float(store.alpha[k] + store.beta[k])


def steady_state_bounds(cfg: UpdateConfig, n_base: float) -> tuple[float, float]:
    """Limit band of the effective sample size.

    A never-evaluated task's n_t tends to n_base + mix*n/forget; an
    always-evaluated one to n_base + n/forget. Every evaluation pattern stays
    between the two. Diverges as forget -> 0, hence the guard.
    """
    if cfg.forget == 0.0:
        raise ConfigError("sample-size limits diverge when forget is 0")
    n = float(cfg.rollouts)
    lower = n_base + cfg.mix * n / cfg.forget
    upper = n_base + n / cfg.forget
    return lower, upper


def posterior_mean(store: PosteriorStore, k: int) -> float:
    """Mean alpha/(alpha+beta) of task k's posterior."""
    _check_index(store, k)
    return float(store.alpha[k] / (store.alpha[k] + store.beta[k]))


def posterior_means(store: PosteriorStore) -> np.ndarray:
    """Vector of posterior means for all tasks."""
    return store.alpha / (store.alpha + store.beta)
