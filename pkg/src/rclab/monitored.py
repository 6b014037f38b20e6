"""Monitored Clifford circuits on a ring or open chain.

One time step is a half-brickwork layer of uniformly random two-qubit
Cliffords (even bonds on even steps, odd bonds on odd steps) followed by a Z
measurement of each site with probability ``p``.  Entropies are recorded in
bits after each step on the ``record_every`` stride.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import _graph_kernels as K
from .graph_state import GraphState, new_zero_state
from .pauli_clifford import N_TWO
from .rng import derive_seed, p_label, stream

__all__ = [
    "CircuitConfig",
    "TrajectoryRecord",
    "run_trajectory",
    "run_ensemble",
    "arcs",
    "region_masks",
    "tripartite_information",
    "mutual_information",
    "steady_state",
    "draw_circuit",
    "evolve",
]


@dataclass(frozen=True)
class CircuitConfig:
    L: int
    p: float
    steps: int | None = None  # default 4L
    boundary: str = "periodic"
    seed: int = 0
    record_every: int = 1
    record_from: int = 0  # only steps t > record_from are sampled

    def __post_init__(self):
        if self.L < 4 or self.L % 2:
            raise ValueError("L must be even and at least 4")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.boundary not in ("periodic", "open"):
            raise ValueError("boundary must be 'periodic' or 'open'")
        if self.steps is not None and self.steps < 1:
            raise ValueError("steps must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be positive")

    @property
    def T(self) -> int:
        return 4 * self.L if self.steps is None else self.steps

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"


@dataclass
class TrajectoryRecord:
    config: CircuitConfig
    times: np.ndarray  # step index after which each sample was taken (1-based)
    s_half: np.ndarray
    i3: np.ndarray
    measurement_count: int
    i2_pairs: dict | None = None
    measured: np.ndarray | None = field(default=None, repr=False)  # (T, L) bool


def arcs(L: int) -> list[np.ndarray]:
    """Four equal contiguous arcs A, B, C, D of a chain of length ``L``."""
    if L % 4:
        raise ValueError("L must be divisible by 4 for the four-arc partition")
    q = L // 4
    return [np.arange(k * q, (k + 1) * q) for k in range(4)]


def region_masks(n: int, regions: Sequence[Iterable[int]]) -> np.ndarray:
    W = max(1, (n + 63) // 64)
    out = np.zeros((len(regions), W), dtype=np.uint64)
    for r, reg in enumerate(regions):
        for v in reg:
            out[r, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    return out


def _i3_regions(L: int) -> list[np.ndarray]:
    A, B, C, _ = arcs(L)
    return [A, B, C, np.r_[A, B], np.r_[A, C], np.r_[B, C], np.r_[A, B, C]]


def _i3_from(s: np.ndarray) -> np.ndarray:
    sa, sb, sc, sab, sac, sbc, sabc = (s[..., k] for k in range(7))
    return sa + sb + sc - sab - sac - sbc + sabc


def mutual_information(state: GraphState, A: Iterable[int], B: Iterable[int]) -> int:
    A, B = list(A), list(B)
    if set(A) & set(B):
        raise ValueError("regions overlap")
    return state.entropy_bits(A) + state.entropy_bits(B) - state.entropy_bits(A + B)


def tripartite_information(state: GraphState, parts: Sequence[Iterable[int]] | None = None) -> int:
    """``I3(A:B:C) = I2(A:B) + I2(A:C) - I2(A:BC)`` in bits; default parts are the four arcs."""
    if parts is None:
        parts = arcs(state.n)[:3]
    A, B, C = (list(x) for x in parts[:3])
    return (
        mutual_information(state, A, B)
        + mutual_information(state, A, C)
        - mutual_information(state, A, B + C)
    )


def draw_circuit(rng: np.random.Generator, L: int, T: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gate ids ``(T, L/2)``, measurement uniforms and outcome coins ``(T, L)``."""
    gates = rng.integers(0, N_TWO, size=(T, L // 2), dtype=np.int64)
    meas_u = rng.random((T, L))
    coins = rng.random((T, L))
    return gates, meas_u, coins


def evolve(state: GraphState, L, periodic, t0, gates, meas_u, coins, p, record=None, masks=None):
    """Run hybrid steps on the first ``L`` qubits of ``state``; returns ``(count, entropies)``."""
    nsteps = gates.shape[0]
    if record is None:
        record = -np.ones(nsteps, dtype=np.int64)
    if masks is None:
        masks = np.zeros((0, state.adj.shape[1]), dtype=np.uint64)
    out = np.zeros((max(int(record.max()) + 1, 0), masks.shape[0]), dtype=np.int64)
    count = K.run_layers(
        state.adj, state.vops, L, periodic, t0, gates, meas_u, coins, float(p), record, masks, out, state.tb
    )
    return int(count), out


def run_trajectory(config: CircuitConfig, keep_measurements: bool = False) -> TrajectoryRecord:
    """One trajectory from ``|0>^L``, reproducible from ``config.seed``."""
    L, T = config.L, config.T
    gates, meas_u, coins = draw_circuit(stream(config.seed), L, T)
    record = -np.ones(T, dtype=np.int64)
    times = np.arange(config.record_every, T + 1, config.record_every)
    times = times[times > config.record_from]
    record[times - 1] = np.arange(times.size)
    with_i3 = L % 4 == 0
    regions = _i3_regions(L) if with_i3 else [np.arange(L // 2)]
    state = new_zero_state(L)
    count, s = evolve(state, L, config.periodic, 0, gates, meas_u, coins, config.p, record, region_masks(L, regions))
    s_half = s[:, 3] if with_i3 else s[:, 0]
    i3 = _i3_from(s) if with_i3 else np.full(times.size, np.nan)
    return TrajectoryRecord(
        config, times, s_half, i3, count, measured=(meas_u < config.p) if keep_measurements else None
    )


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_ensemble(
    L: int,
    p: float,
    n_traj: int,
    master_seed: int = 0,
    threads: int = 1,
    **kw,
) -> list[TrajectoryRecord]:
    """Independent trajectories; trajectory ``k`` is seeded by ``(master_seed, L, p, k)``."""
    base = CircuitConfig(L, p, **kw)
    cfgs = [replace(base, seed=derive_seed(master_seed, L, p_label(p), k)) for k in range(n_traj)]
    return _map(run_trajectory, cfgs, threads)


def steady_state(records: Sequence[TrajectoryRecord], observable: str = "i3", window: int | None = None):
    """Mean and standard error over trajectories of the late-time average.

    Each trajectory is averaged over samples taken in the last ``window``
    steps (default ``L``); the spread of those averages gives the error.
    """
    vals = []
    for r in records:
        w = r.config.L if window is None else window
        sel = r.times > r.config.T - w
        vals.append(getattr(r, observable)[sel].mean())
    vals = np.asarray(vals, dtype=float)
    err = vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else np.nan
    return float(vals.mean()), float(err), vals
