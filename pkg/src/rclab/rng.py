"""Counter-based random streams for reproducible, order-independent trajectories.

Every trajectory draws from its own Philox stream keyed by a 64-bit seed that
is derived from ``(master_seed, *labels, k)`` through ``SeedSequence``; the
derived seed alone regenerates the trajectory.
"""
from __future__ import annotations

import numpy as np

__all__ = ["derive_seed", "stream", "p_label"]


def p_label(p: float) -> int:
    """Integer label of a probability, stable under float formatting."""
    return int(round(float(p) * 1_000_000_000))


def derive_seed(master: int, *labels: int) -> int:
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, *map(int, labels)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))
