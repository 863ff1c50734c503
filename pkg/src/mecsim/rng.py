"""Deterministic, label-separated random streams.

Every source of randomness in a run (arrivals, fading, mobility, placement)
gets its own stream keyed by (seed, label), so the same seed reproduces the
same realization regardless of which policy consumes it or in what order the
streams are read relative to each other.
"""

from __future__ import annotations

import hashlib

import numpy as np


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for (seed, label), stable across platforms."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence([int(seed) % (1 << 64), key]))
