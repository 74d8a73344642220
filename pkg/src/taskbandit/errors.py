"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration, including unknown keys."""


class EvidenceError(ValueError):
    """Malformed rollout evidence (bad counts, duplicate or unknown task ids)."""


class StateError(RuntimeError):
    """Operation invalid in the current state (e.g. predictor not initialized)."""


class CheckpointError(ValueError):
    """Unreadable checkpoint or checkpoint/config mismatch."""
