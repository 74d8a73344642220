"""Foreign-interface layer for taskbandit: create an engine handle, request
batches, report rollout outcomes, save and restore state."""

from .handle import (
    EngineHandle,
    InvalidHandleError,
    SequencingError,
    create,
    load,
)

__version__ = "0.1.0"

__all__ = [
    "EngineHandle",
    "InvalidHandleError",
    "SequencingError",
    "create",
    "load",
]
