"""On-disk formats. All writers are deterministic byte-for-byte.

Run log: one JSON object per line, one line per step, keys in fixed order
(step, selected, successes, failures, mu_momentum, posterior_digest,
true_rates). Floats are written at full round-trip precision.

Curves: two whitespace-separated columns (step, performance), '#' comments.
Reference profiles: two columns (weak rate, strong rate), task id by row.
Embeddings: dense whitespace-separated matrix, one task per row.
Histogram: header row of bucket labels, then one row per step.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .implicit import ReferenceProfile
from .metrics import PerformanceCurve, etr, success_rate_histogram
from .simulator import RunLog, StepRecord

__all__ = [
    "runlog_line",
    "write_runlog",
    "append_runlog_records",
    "read_runlog",
    "write_curve",
    "read_curve",
    "read_performance_input",
    "etr_curve",
    "write_histogram",
    "read_profile_table",
    "read_embeddings",
]


def runlog_line(record: StepRecord) -> str:
    payload = {
        "step": int(record.step),
        "selected": [int(x) for x in record.selected],
        "successes": [int(x) for x in record.successes],
        "failures": [int(x) for x in record.failures],
        "mu_momentum": None
        if record.mu_momentum is None
        else float(record.mu_momentum),
        "posterior_digest": record.posterior_digest,
        "true_rates": [float(x) for x in record.true_rates],
    }
    return json.dumps(payload)


def write_runlog(path: Path, log: RunLog) -> None:
    with open(path, "w") as fh:
        for record in log.records:
            fh.write(runlog_line(record) + "\n")


def append_runlog_records(path: Path, records: list[StepRecord]) -> None:
    with open(path, "a") as fh:
        for record in records:
            fh.write(runlog_line(record) + "\n")


def _record_from_payload(payload: dict) -> StepRecord:
    return StepRecord(
        step=payload["step"],
        selected=np.asarray(payload["selected"], dtype=np.intp),
        successes=np.asarray(payload["successes"], dtype=np.int64),
        failures=np.asarray(payload["failures"], dtype=np.int64),
        mu_momentum=payload["mu_momentum"],
        posterior_digest=payload["posterior_digest"],
        true_rates=np.asarray(payload["true_rates"], dtype=np.float64),
    )


def read_runlog(path: Path) -> RunLog:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(_record_from_payload(json.loads(line)))
    if records:
        first = records[0]
        rollouts = int(first.successes[0] + first.failures[0]) if first.successes.size else 0
    else:
        rollouts = 0
    return RunLog(rollouts=rollouts, records=records)


def _fmt_step(step: float) -> str:
    return str(int(step)) if float(step).is_integer() else repr(float(step))


def write_curve(path: Path, curve: PerformanceCurve) -> None:
    with open(path, "w") as fh:
        for step, value in zip(curve.steps, curve.values):
            fh.write(f"{_fmt_step(step)} {float(value)!r}\n")


def read_curve(path: Path) -> PerformanceCurve:
    rows = np.loadtxt(path, comments="#", ndmin=2)
    if rows.shape[1] != 2:
        raise ConfigError(f"{path}: expected two columns (step, performance)")
    return PerformanceCurve(rows[:, 0], rows[:, 1])


def etr_curve(log: RunLog) -> PerformanceCurve:
    from .metrics import BatchOutcome

    steps = [r.step for r in log.records]
    values = [etr(BatchOutcome(r.successes, log.rollouts)) for r in log.records]
    return PerformanceCurve(np.asarray(steps, dtype=np.float64), np.asarray(values))


def read_performance_input(path: Path) -> PerformanceCurve:
    """A curve file, or a run log whose ETR-per-step becomes the curve."""
    with open(path) as fh:
        for line in fh:
            stripped = line.strip()
            if stripped:
                first = stripped[0]
                break
        else:
            raise ConfigError(f"{path}: empty performance input")
    if first == "{":
        return etr_curve(read_runlog(path))
    return read_curve(path)


def write_histogram(path: Path, log: RunLog) -> None:
    grid = success_rate_histogram(log)
    labels = " ".join(str(s) for s in range(log.rollouts + 1))
    with open(path, "w") as fh:
        fh.write(f"step {labels}\n")
        for record, row in zip(log.records, grid):
            cells = " ".join(repr(float(v)) for v in row)
            fh.write(f"{record.step} {cells}\n")


def read_profile_table(path: Path) -> ReferenceProfile:
    rows = np.loadtxt(path, comments="#", ndmin=2)
    if rows.shape[1] != 2:
        raise ConfigError(f"{path}: expected two columns (weak, strong)")
    return ReferenceProfile(rows[:, 0], rows[:, 1])


def read_embeddings(path: Path) -> np.ndarray:
    rows = np.loadtxt(path, comments="#", ndmin=2)
    return np.asarray(rows, dtype=np.float64)
