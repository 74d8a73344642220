"""Evaluation metrics over performance curves and batch outcomes.

ETR (effective task ratio): fraction of a batch whose success count lands
strictly between 0 and n; all-fail and all-pass rollouts carry no learning
signal.

TTB (time to baseline, per target fraction tau): the baseline curve defines
a target P_tau = P_init + tau*(P_best - P_init); TTB is the ratio of the
method's first crossing step to the baseline's, crossings linearly
interpolated between recorded points. Below 1 means faster than baseline.

BSF (best so far, per budget fraction beta): ratio of the two curves' best
values among points with step <= floor(beta*T), T the baseline's last step.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor

import numpy as np

from .simulator import RunLog

__all__ = [
    "PerformanceCurve",
    "BatchOutcome",
    "NOT_REACHED",
    "etr",
    "ttb",
    "bsf",
    "success_rate_histogram",
    "aggregate_curves",
]

# sentinel: the method never attains the target within its window
NOT_REACHED = None


@dataclass(frozen=True)
class PerformanceCurve:
    steps: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        steps = np.asarray(self.steps, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "values", values)
        if steps.ndim != 1 or steps.shape != values.shape or steps.size == 0:
            raise ValueError("curve needs matching, non-empty step/value arrays")
        if not np.all(np.diff(steps) > 0):
            raise ValueError("curve steps must be strictly increasing")


@dataclass(frozen=True)
class BatchOutcome:
    successes: np.ndarray
    rollouts: int

    def __post_init__(self) -> None:
        succ = np.asarray(self.successes, dtype=np.int64)
        object.__setattr__(self, "successes", succ)
        if np.any(succ < 0) or np.any(succ > self.rollouts):
            raise ValueError("success counts must lie in [0, rollouts]")


def etr(outcome: BatchOutcome) -> float:
    """Fraction of the batch with 0 < successes < rollouts."""
    succ = outcome.successes
    if succ.size == 0:
        raise ValueError("ETR of an empty batch is undefined")
    mid = (succ > 0) & (succ < outcome.rollouts)
    return float(np.count_nonzero(mid) / succ.size)


def _first_crossing(curve: PerformanceCurve, level: float) -> float | None:
    """Step of the first (interpolated) crossing of level, None if never."""
    at_or_above = curve.values >= level
    if not at_or_above.any():
        return None
    j = int(np.argmax(at_or_above))
    if j == 0:
        return float(curve.steps[0])
    s0, s1 = curve.steps[j - 1], curve.steps[j]
    v0, v1 = curve.values[j - 1], curve.values[j]
    return float(s0 + (level - v0) * (s1 - s0) / (v1 - v0))


def ttb(
    baseline: PerformanceCurve, method: PerformanceCurve, tau: float
) -> float | None:
    """Step-ratio to reach the baseline's tau-fraction improvement target."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    p_init = float(baseline.values[0])
    p_best = float(baseline.values.max())
    target = p_init + tau * (p_best - p_init)
    t_baseline = _first_crossing(baseline, target)
    assert t_baseline is not None, "baseline always attains its own maximum"
    t_method = _first_crossing(method, target)
    if t_method is None:
        return NOT_REACHED
    if t_method == t_baseline:
        # covers a flat baseline hitting at its first step (0/0 otherwise)
        return 1.0
    return t_method / t_baseline


def bsf(baseline: PerformanceCurve, method: PerformanceCurve, beta: float) -> float:
    """Ratio of best values within a floor(beta*T) step budget."""
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    t_eval = floor(beta * float(baseline.steps[-1]))
    base_window = baseline.values[baseline.steps <= t_eval]
    method_window = method.values[method.steps <= t_eval]
    if base_window.size == 0 or method_window.size == 0:
        raise ValueError(f"no recorded points within step budget {t_eval}")
    best_baseline = float(base_window.max())
    if best_baseline == 0.0:
        raise ValueError("baseline best is zero: ratio undefined")
    return float(method_window.max()) / best_baseline


def success_rate_histogram(log: RunLog) -> np.ndarray:
    """Per-step distribution of batch success counts.

    Row t holds the proportion of step t's batch in each bucket s = 0..n;
    every row sums to 1.
    """
    n = log.rollouts
    rows = np.zeros((len(log.records), n + 1), dtype=np.float64)
    for i, record in enumerate(log.records):
        counts = np.bincount(record.successes, minlength=n + 1)
        rows[i] = counts / record.successes.size
    return rows


def aggregate_curves(curves: list[PerformanceCurve]) -> PerformanceCurve:
    """Unweighted mean of curves sharing one step grid."""
    if not curves:
        raise ValueError("nothing to aggregate")
    steps = curves[0].steps
    for c in curves[1:]:
        if c.steps.shape != steps.shape or not np.array_equal(c.steps, steps):
            raise ValueError("curves must share the same step grid")
    stacked = np.stack([c.values for c in curves])
    return PerformanceCurve(steps.copy(), stacked.mean(axis=0))
