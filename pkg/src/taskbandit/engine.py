"""The select/report core shared by the simulator, the CLI, and the bindings.

One engine owns one belief state. A step is: ``select()`` a batch (pure, so
recomputing it is safe), hand the rollout outcomes to ``report()``, which
folds them into the capability tracker and the posterior in one transaction.
``tick()`` advances a step with no evaluated batch, for loops that skipped
the engine. All randomness is drawn from per-step named streams, so an engine
restored from a checkpoint continues bit-exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, EvidenceError, StateError
from .implicit import (
    CapabilityTracker,
    KernelConfig,
    ReferenceProfile,
    capability_coefficient,
    predict_rates_interpolation,
    predict_rates_kernel,
    update_momentum,
)
from .posterior import EvidenceBatch, PosteriorStore, update_posterior
from .rngstreams import stream
from .selector import SelectionResult, Strategy, offline_select, random_select, thompson_select

__all__ = ["Engine", "StepSummary", "posterior_digest"]


def posterior_digest(store: PosteriorStore) -> str:
    """sha256 over the raw float64 bytes of (alpha, beta), in task order."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(store.alpha).tobytes())
    h.update(np.ascontiguousarray(store.beta).tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class StepSummary:
    """What one reported step looked like: batch ETR and the smoothed
    capability value after folding the batch in. ETR is None for tick()."""

    etr: float | None
    mu_momentum: float | None


class Engine:
    def __init__(
        self,
        *,
        strategy: Strategy,
        store: PosteriorStore,
        seed: int,
        profile: ReferenceProfile | None = None,
        kernel: KernelConfig | None = None,
        tracker: CapabilityTracker | None = None,
        step: int = 0,
    ) -> None:
        if strategy.plugin == "interpolation" and profile is None:
            raise ConfigError("interpolation predictor needs a reference profile")
        if strategy.plugin == "kernel" and kernel is None:
            raise ConfigError("kernel predictor needs embeddings")
        if strategy.mode == "offline" and profile is None:
            raise ConfigError("offline ordering needs a reference profile")
        if profile is not None and profile.task_count != store.task_count:
            raise ConfigError("profile and store disagree on task count")
        if kernel is not None and kernel.embeddings.shape[0] != store.task_count:
            raise ConfigError("embeddings and store disagree on task count")
        self.strategy = strategy
        self.store = store
        self.profile = profile
        self.kernel = kernel
        self.tracker = tracker if tracker is not None else CapabilityTracker()
        self.seed = seed
        self.step = step
        self.last_predictions: np.ndarray | None = None
        self._pending: SelectionResult | None = None

    @property
    def task_count(self) -> int:
        return self.store.task_count

    def digest(self) -> str:
        return posterior_digest(self.store)

    def select(self) -> SelectionResult:
        """Choose the batch for the current step. Pure given engine state:
        calling twice at the same step returns the same batch."""
        cfg = self.strategy.selector
        mode = self.strategy.mode
        if mode == "thompson":
            rng = stream(self.seed, "select", self.step)
            result = thompson_select(self.store, cfg, rng)
        elif mode == "random":
            rng = stream(self.seed, "select", self.step)
            result = random_select(self.task_count, cfg.batch_size, rng)
        elif mode == "offline":
            cursor = (self.step * cfg.batch_size) % self.task_count
            result = offline_select(self.profile, cursor, cfg.batch_size)
        else:
            raise ConfigError(f"unknown selection mode {mode!r}")
        self._pending = result
        return result

    def report(self, outcomes: Mapping[int, tuple[int, int]]) -> StepSummary:
        """Fold one batch of rollout outcomes in and advance a step.

        Transactional: any validation error leaves the engine untouched.
        Outcome ids must be exactly the last selected batch.
        """
        if self._pending is None:
            raise StateError("no selected batch to report against")
        expected = set(int(i) for i in self._pending.task_ids)
        got = set(int(i) for i in outcomes)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise EvidenceError(
                f"outcome ids differ from the selected batch"
                f" (missing {missing}, unexpected {extra})"
            )

        n = self.strategy.update.rollouts
        explicit = EvidenceBatch(dict(outcomes))
        ids = self._pending.task_ids
        succ = np.array([outcomes[int(i)][0] for i in ids], dtype=np.float64)
        rates = succ / n

        tracker_new = self.tracker
        if self.profile is not None:
            mu = capability_coefficient(
                float(rates.mean()),
                float(self.profile.p_weak[ids].mean()),
                float(self.profile.p_strong[ids].mean()),
                self.tracker.epsilon,
            )
            tracker_new = update_momentum(self.tracker, mu)

        predictions = self._predict(tracker_new, ids, rates)
        implicit = {
            k: float(predictions[k]) for k in range(self.task_count) if k not in got
        }
        store_new = update_posterior(self.store, explicit, implicit, self.strategy.update)

        # all validation passed: commit
        self.store = store_new
        self.tracker = tracker_new
        self.last_predictions = predictions
        self.step += 1
        self._pending = None
        effective = np.count_nonzero((succ > 0) & (succ < n))
        return StepSummary(
            etr=effective / len(ids), mu_momentum=self._tracker_value(tracker_new)
        )

    def tick(self) -> StepSummary:
        """Advance one step with no evaluated batch: decay plus predicted
        evidence only. Needs the interpolation predictor with at least one
        batch already folded in; the kernel has no batch to average here."""
        if self._pending is not None:
            raise StateError("cannot tick while a selected batch is unreported")
        if self.strategy.plugin != "interpolation":
            raise StateError("tick is only defined for the interpolation predictor")
        if not self.tracker.initialized:
            raise StateError("tick before any reported batch: no capability estimate")
        predictions = predict_rates_interpolation(self.profile, self.tracker)
        implicit = {k: float(predictions[k]) for k in range(self.task_count)}
        store_new = update_posterior(
            self.store, EvidenceBatch({}), implicit, self.strategy.update
        )
        self.store = store_new
        self.last_predictions = predictions
        self.step += 1
        return StepSummary(etr=None, mu_momentum=self.tracker.mu_momentum)

    def _predict(
        self, tracker: CapabilityTracker, ids: np.ndarray, rates: np.ndarray
    ) -> np.ndarray:
        if self.strategy.plugin == "interpolation":
            return predict_rates_interpolation(self.profile, tracker)
        return predict_rates_kernel(self.kernel, ids, rates)

    def _tracker_value(self, tracker: CapabilityTracker) -> float | None:
        return tracker.mu_momentum if tracker.initialized else None
