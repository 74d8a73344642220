"""Predicted success rates for tasks that were not evaluated this step.

Two interchangeable predictors:

* interpolation: place the learner between a weak and a strong reference
  model. From one evaluated batch, the position estimate is

      mu = (rate_current - rate_weak) / (rate_strong - rate_weak)

  over batch averages, smoothed across steps with momentum
  mu_momentum' = gamma*mu_momentum + (1-gamma)*mu. The prediction for task k
  is clip(mu_momentum*p_strong[k] + (1-mu_momentum)*p_weak[k], 0, 1).
  mu_momentum itself is never clipped: values above 1 or below 0 extrapolate
  beyond the reference models, and only the final rate is clamped.

* kernel: softmax-weighted average of the evaluated batch's empirical rates,
  weighted by embedding similarity to the target task. Convex in the batch
  rates, so it cannot extrapolate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import StateError

__all__ = [
    "ReferenceProfile",
    "CapabilityTracker",
    "KernelConfig",
    "capability_coefficient",
    "update_momentum",
    "predict_rate_interpolation",
    "predict_rates_interpolation",
    "predict_rate_kernel",
    "predict_rates_kernel",
    "pseudo_counts",
]


@dataclass(frozen=True)
class ReferenceProfile:
    """Per-task success rates of the weak and strong reference models."""

    p_weak: np.ndarray
    p_strong: np.ndarray

    def __post_init__(self) -> None:
        weak = np.asarray(self.p_weak, dtype=np.float64)
        strong = np.asarray(self.p_strong, dtype=np.float64)
        object.__setattr__(self, "p_weak", weak)
        object.__setattr__(self, "p_strong", strong)
        if weak.ndim != 1 or weak.shape != strong.shape:
            raise ValueError("profile columns must be 1-d and equal length")
        for name, arr in (("p_weak", weak), ("p_strong", strong)):
            if not np.all((arr >= 0.0) & (arr <= 1.0)):
                raise ValueError(f"{name} entries must lie in [0, 1]")

    @property
    def task_count(self) -> int:
        return self.p_weak.shape[0]


@dataclass(frozen=True)
class CapabilityTracker:
    """Scalar learner-position estimate with momentum smoothing."""

    gamma: float = 0.9
    epsilon: float = 1e-6
    mu_momentum: float = 0.0
    initialized: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class KernelConfig:
    """Task embeddings and softmax temperature for the kernel predictor."""

    embeddings: np.ndarray
    temperature: float

    def __post_init__(self) -> None:
        emb = np.asarray(self.embeddings, dtype=np.float64)
        object.__setattr__(self, "embeddings", emb)
        if emb.ndim != 2:
            raise ValueError("embeddings must be a 2-d (task x dim) array")
        if self.temperature <= 0.0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")


def capability_coefficient(
    batch_rate_current: float,
    batch_rate_weak: float,
    batch_rate_strong: float,
    epsilon: float,
) -> float:
    """Position of the current learner between the reference averages.

    Unclipped; values outside [0, 1] extrapolate. When the references are
    closer than epsilon (or inverted), epsilon is added to the denominator so
    the division stays finite rather than raising.
    """
    denom = batch_rate_strong - batch_rate_weak
    if denom <= epsilon:
        denom += epsilon
    if denom == 0.0:
        # only reachable at strong - weak == -epsilon exactly; keep total
        denom = epsilon
    return (batch_rate_current - batch_rate_weak) / denom


def update_momentum(tracker: CapabilityTracker, mu_new: float) -> CapabilityTracker:
    """Fold one fresh coefficient into the tracker; first value seeds it."""
    if not tracker.initialized:
        return replace(tracker, mu_momentum=float(mu_new), initialized=True)
    smoothed = tracker.gamma * tracker.mu_momentum + (1.0 - tracker.gamma) * mu_new
    return replace(tracker, mu_momentum=smoothed)


def predict_rates_interpolation(
    profile: ReferenceProfile, tracker: CapabilityTracker
) -> np.ndarray:
    """Clipped interpolated rates for every task at once."""
    if not tracker.initialized:
        raise StateError("capability tracker has seen no batch yet")
    mu = tracker.mu_momentum
    raw = mu * profile.p_strong + (1.0 - mu) * profile.p_weak
    return np.clip(raw, 0.0, 1.0)


def predict_rate_interpolation(
    profile: ReferenceProfile, tracker: CapabilityTracker, k: int
) -> float:
    """clip(mu_momentum*p_strong[k] + (1-mu_momentum)*p_weak[k], 0, 1)."""
    if not tracker.initialized:
        raise StateError("capability tracker has seen no batch yet")
    if not 0 <= k < profile.task_count:
        raise IndexError(f"task id {k} outside [0, {profile.task_count})")
    mu = tracker.mu_momentum
    raw = mu * profile.p_strong[k] + (1.0 - mu) * profile.p_weak[k]
    return float(min(1.0, max(0.0, raw)))


def predict_rates_kernel(
    cfg: KernelConfig, batch_ids: np.ndarray, batch_rates: np.ndarray
) -> np.ndarray:
    """Kernel predictions for every task given one evaluated batch.

    Weight of batch task i for target k is softmax_i(<e_i, e_k>/temperature),
    computed with max-subtraction so large inner products cannot overflow.
    """
    batch_ids = np.asarray(batch_ids, dtype=np.intp)
    batch_rates = np.asarray(batch_rates, dtype=np.float64)
    if batch_ids.size == 0:
        raise ValueError("kernel prediction needs a non-empty batch")
    logits = cfg.embeddings[batch_ids] @ cfg.embeddings.T / cfg.temperature
    logits -= logits.max(axis=0, keepdims=True)
    weights = np.exp(logits)
    weights /= weights.sum(axis=0, keepdims=True)
    return batch_rates @ weights


def predict_rate_kernel(
    cfg: KernelConfig, batch_ids: np.ndarray, batch_rates: np.ndarray, k: int
) -> float:
    """Single-task kernel prediction; see predict_rates_kernel."""
    if not 0 <= k < cfg.embeddings.shape[0]:
        raise IndexError(f"task id {k} outside [0, {cfg.embeddings.shape[0]})")
    return float(predict_rates_kernel(cfg, batch_ids, batch_rates)[k])


def pseudo_counts(p_tilde: float, n: int) -> tuple[float, float]:
    """Split n rollouts' worth of mass by a predicted rate.

    The failure side is n minus the success side, so the pair sums to n
    exactly in floating point.
    """
    if not 0.0 <= p_tilde <= 1.0:
        raise ValueError(f"predicted rate must lie in [0, 1], got {p_tilde}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    s_tilde = p_tilde * n
    return s_tilde, n - s_tilde
