"""Checkpoints: engine state as structured text, restorable bit-exactly.

Arrays are stored twice: a decimal list at full round-trip precision for
human inspection, and a little-endian float64 hex string that restore
actually uses, so a resumed run is binary-identical to an uninterrupted one.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import Engine
from .errors import CheckpointError
from .implicit import CapabilityTracker
from .posterior import PosteriorStore

__all__ = ["save_checkpoint", "load_checkpoint_state", "restore_engine",
           "describe_checkpoint"]

_FORMAT = "taskbandit-checkpoint-v1"
_ARRAYS = ("alpha", "beta", "alpha_base", "beta_base")


def _encode_array(arr: np.ndarray) -> dict:
    le = np.ascontiguousarray(arr, dtype="<f8")
    return {"decimal": [float(x) for x in arr], "hex": le.tobytes().hex()}


def _decode_array(node: dict, name: str) -> np.ndarray:
    try:
        raw = bytes.fromhex(node["hex"])
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"array {name}: bad hex channel: {exc}") from None
    return np.frombuffer(raw, dtype="<f8").astype(np.float64)


def save_checkpoint(path: Path, engine: Engine, config_hash: str) -> None:
    tracker = engine.tracker
    payload = {
        "format": _FORMAT,
        "step": engine.step,
        "strategy": engine.strategy.name,
        "config_hash": config_hash,
        "rng": {"scheme": "per-step-streams", "counter": engine.step},
        "tracker": {
            "gamma": tracker.gamma,
            "epsilon": tracker.epsilon,
            "initialized": tracker.initialized,
            "mu_momentum": tracker.mu_momentum,
            "mu_momentum_hex": float(tracker.mu_momentum).hex(),
        },
        "arrays": {
            name: _encode_array(getattr(engine.store, name)) for name in _ARRAYS
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_checkpoint_state(path: Path) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"checkpoint {path} is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != _FORMAT:
        raise CheckpointError(f"{path} is not a {_FORMAT} file")
    return payload


def restore_engine(path: Path, engine: Engine, config_hash: str) -> Engine:
    """Overwrite a freshly built engine's state from a checkpoint.

    The engine must come from the same config: the stored hash and strategy
    name are required to match.
    """
    payload = load_checkpoint_state(path)
    if payload["config_hash"] != config_hash:
        raise CheckpointError(
            "checkpoint was written by a different config"
            f" (hash {payload['config_hash'][:12]}..., expected {config_hash[:12]}...)"
        )
    if payload["strategy"] != engine.strategy.name:
        raise CheckpointError(
            f"checkpoint strategy {payload['strategy']!r}"
            f" differs from configured {engine.strategy.name!r}"
        )
    arrays = {name: _decode_array(payload["arrays"][name], name) for name in _ARRAYS}
    count = engine.store.task_count
    for name, arr in arrays.items():
        if arr.shape[0] != count:
            raise CheckpointError(
                f"array {name} has {arr.shape[0]} tasks, config has {count}"
            )
    t = payload["tracker"]
    engine.store = PosteriorStore(
        arrays["alpha"], arrays["beta"], arrays["alpha_base"], arrays["beta_base"]
    )
    engine.tracker = CapabilityTracker(
        gamma=t["gamma"],
        epsilon=t["epsilon"],
        mu_momentum=float.fromhex(t["mu_momentum_hex"]),
        initialized=t["initialized"],
    )
    engine.step = int(payload["step"])
    return engine


def describe_checkpoint(path: Path) -> dict:
    """Human-oriented summary for the inspect subcommand."""
    payload = load_checkpoint_state(path)
    alpha = _decode_array(payload["arrays"]["alpha"], "alpha")
    beta = _decode_array(payload["arrays"]["beta"], "beta")
    return {
        "step": payload["step"],
        "strategy": payload["strategy"],
        "config_hash": payload["config_hash"],
        "tasks": int(alpha.shape[0]),
        "mean_sample_size": float((alpha + beta).mean()) if alpha.size else 0.0,
        "mu_momentum": payload["tracker"]["mu_momentum"],
        "tracker_initialized": payload["tracker"]["initialized"],
    }
