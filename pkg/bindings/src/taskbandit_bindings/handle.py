"""Handle-based access to a taskbandit engine for external training loops.

The handle enforces the select -> report alternation of the training loop:
each selected batch must be reported (or the step skipped via tick) before
the next selection. State advances only on successful calls; a rejected
report leaves the engine exactly as it was.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from taskbandit import (
    StepSummary,
    build_engine,
    build_profile,
    parse_config_text,
    restore_engine,
    save_checkpoint,
)


class SequencingError(RuntimeError):
    """select/report called out of turn."""


class InvalidHandleError(RuntimeError):
    """Operation on a closed handle."""


class EngineHandle:
    """Single-threaded, stateful wrapper around one engine instance.

    Obtain via create() or load(); release with close(). Not constructed
    directly.
    """

    def __init__(self, engine, config_hash: str):
        self._engine = engine
        self._config_hash = config_hash
        self._awaiting_report = False

    def _live(self):
        if self._engine is None:
            raise InvalidHandleError("handle is closed")
        return self._engine

    @property
    def step(self) -> int:
        return self._live().step

    @property
    def task_count(self) -> int:
        return self._live().task_count

    def digest(self) -> str:
        """Posterior digest of the current engine state."""
        return self._live().digest()

    def select_batch(self) -> list[int]:
        """Ids of the next batch to roll out. One selection per step."""
        engine = self._live()
        if self._awaiting_report:
            raise SequencingError(
                "previous batch not reported yet; call report_results or tick"
            )
        picked = engine.select()
        self._awaiting_report = True
        return [int(k) for k in picked.task_ids]

    def report_results(
        self, outcomes: Mapping[int, tuple[int, int]]
    ) -> StepSummary:
        """Fold rollout outcomes for the outstanding batch into the engine.

        Outcome ids must be exactly the selected batch and each (s, f) must
        total the configured rollout count. On any validation error the
        engine state and the outstanding batch are both preserved.
        """
        engine = self._live()
        if not self._awaiting_report:
            raise SequencingError("no outstanding batch to report")
        summary = engine.report(outcomes)
        self._awaiting_report = False
        return summary

    def tick(self) -> StepSummary:
        """Skip a step: decay-only update with no explicit evidence."""
        engine = self._live()
        if self._awaiting_report:
            raise SequencingError(
                "previous batch not reported yet; call report_results first"
            )
        return engine.tick()

    def save(self, path) -> None:
        """Write engine state in the core checkpoint format."""
        save_checkpoint(Path(path), self._live(), self._config_hash)

    def close(self) -> None:
        """Invalidate the handle. Idempotent."""
        self._engine = None


def create(config_document: str) -> EngineHandle:
    """Build a fresh engine from a YAML config document.

    The document is validated by the same parser as the command line, so
    invalid input fails with the identical diagnostic text.
    """
    exp = parse_config_text(config_document)
    profile = build_profile(exp.run)
    engine = build_engine(exp.run, profile)
    return EngineHandle(engine, exp.config_hash)


def load(config_document: str, checkpoint_path) -> EngineHandle:
    """Rebuild an engine from a config plus a checkpoint written by save()
    (or by the command line run of the same config)."""
    exp = parse_config_text(config_document)
    profile = build_profile(exp.run)
    engine = build_engine(exp.run, profile)
    engine = restore_engine(Path(checkpoint_path), engine, exp.config_hash)
    return EngineHandle(engine, exp.config_hash)
