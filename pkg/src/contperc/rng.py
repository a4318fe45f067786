"""Reproducible random streams built on the Philox counter-based generator.

Every stochastic routine in the package takes an explicit 64-bit seed and
derives independent substreams from (seed, *key) with a SeedSequence, so
results never depend on scheduling or evaluation order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "derive_seed"]


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return a Philox generator for the substream identified by (seed, *key)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seed=ss))


def derive_seed(seed: int, *key: int) -> int:
    """Fold (seed, *key) into a single 64-bit integer seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])
