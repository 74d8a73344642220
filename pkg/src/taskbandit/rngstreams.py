"""Named, per-step random streams derived from a single run seed.

Every random draw in a run comes from a stream addressed by
``(run_seed, stream_name, step)``. Streams are derived by counter, never by
consuming a parent generator, so any step can be reconstructed in isolation:
a resumed run draws exactly the bits the uninterrupted run would have drawn.
"""

from __future__ import annotations

import numpy as np

# Fixed stream ids. Appending is safe; renumbering breaks reproducibility.
_STREAM_IDS = {
    "select": 0,
    "rollout": 1,
    "profile": 2,
    "noise": 3,
}


def stream(seed: int, name: str, step: int) -> np.random.Generator:
    """Return the generator for stream ``name`` at ``step`` of run ``seed``."""
    try:
        sid = _STREAM_IDS[name]
    except KeyError:
        raise ValueError(f"unknown stream name: {name!r}") from None
    if step < 0:
        raise ValueError("step must be >= 0")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sid, step)))
