"""Purification dynamics and reference-qubit probes of the monitored circuit.

Qubit layout: system sites ``0..L-1`` first, auxiliary qubits after them.
The hybrid dynamics only ever acts on the system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .graph_state import GraphState, new_zero_state
from .monitored import CircuitConfig, _map, draw_circuit, evolve, region_masks
from .rng import derive_seed, p_label, stream

__all__ = [
    "PurificationConfig",
    "PurificationResult",
    "ProbeConfig",
    "ProbeResult",
    "NOT_PURIFIED",
    "purification_run",
    "purification_ensemble",
    "probe_trajectory",
    "order_parameter_probe",
    "correlation_probe",
    "entangle_reference",
]

NOT_PURIFIED = math.inf


@dataclass(frozen=True)
class PurificationConfig:
    base: CircuitConfig
    purity_threshold_bits: float = 0.5
    max_steps: int | None = None  # default base.T

    def __post_init__(self):
        if not 0 < self.purity_threshold_bits <= 1:
            raise ValueError("threshold must lie in (0, 1]")

    @property
    def steps(self) -> int:
        return self.base.T if self.max_steps is None else self.max_steps


@dataclass
class PurificationResult:
    config: PurificationConfig
    t_p: float  # first step with S(refs) <= threshold, NOT_PURIFIED otherwise
    s_ref: np.ndarray  # S(references) in bits after steps 1..len(s_ref)


def _bell_pairs(L: int) -> GraphState:
    """System site ``i`` maximally entangled with reference ``L+i``."""
    g = GraphState(2 * L)
    a = np.zeros((2 * L, 2 * L), dtype=np.uint8)
    idx = np.arange(L)
    a[idx, idx + L] = a[idx + L, idx] = 1
    g.set_graph(a)
    g.vops[L:] = g.tables.named["H"]
    return g


def purification_run(config: PurificationConfig, stop_early: bool = True) -> PurificationResult:
    """Start maximally mixed (via ``L`` Bell pairs) and track S(references) per step.

    With ``stop_early`` the run ends once the threshold is crossed; since
    S(references) never increases, the remaining series is implied.
    """
    base = config.base
    L, T = base.L, config.steps
    gates, meas_u, coins = draw_circuit(stream(base.seed), L, T)
    g = _bell_pairs(L)
    masks = region_masks(2 * L, [range(L, 2 * L)])
    out = []
    block = max(1, L)
    t = 0
    t_p = NOT_PURIFIED
    while t < T:
        n = min(block, T - t)
        rec = np.arange(n, dtype=np.int64)
        _, s = evolve(g, L, base.periodic, t, gates[t : t + n], meas_u[t : t + n], coins[t : t + n], base.p, rec, masks)
        out.append(s[:, 0])
        hit = np.nonzero(s[:, 0] <= config.purity_threshold_bits)[0]
        if hit.size and t_p == NOT_PURIFIED:
            t_p = float(t + hit[0] + 1)
        t += n
        if stop_early and t_p != NOT_PURIFIED:
            break
    return PurificationResult(config, t_p, np.concatenate(out))


def purification_ensemble(L, p, n_traj, master_seed=0, threads=1, threshold=0.5, max_steps=None, **kw):
    base = CircuitConfig(L, p, **kw)
    cfgs = [
        PurificationConfig(replace(base, seed=derive_seed(master_seed, 1, L, p_label(p), k)), threshold, max_steps)
        for k in range(n_traj)
    ]
    return _map(lambda c: purification_run(c, stop_early=False), cfgs, threads)


@dataclass(frozen=True)
class ProbeConfig:
    base: CircuitConfig
    t0: int | None = None  # default 2L
    t1: int | None = None  # default 2L
    probe_sites: tuple[int, ...] | None = None
    surface: bool = False
    scramble_with_measurements: bool = True

    def sites(self, n_probes: int) -> tuple[int, ...]:
        L = self.base.L
        if self.probe_sites is not None:
            s = tuple(int(x) for x in self.probe_sites)
        elif self.surface:
            s = (0,) if n_probes == 1 else (0, L - 1)
        else:
            s = (L // 2,) if n_probes == 1 else (L // 4, 3 * L // 4)
        if len(s) != n_probes:
            raise ValueError(f"expected {n_probes} probe sites")
        if any(not 0 <= x < L for x in s):
            raise ValueError("probe site out of range")
        if len(set(s)) != len(s):
            raise ValueError("probe sites coincide")
        return s

    @property
    def T0(self) -> int:
        return 2 * self.base.L if self.t0 is None else self.t0

    @property
    def T1(self) -> int:
        return 2 * self.base.L if self.t1 is None else self.t1


@dataclass
class ProbeResult:
    s_r: tuple[int, ...]
    s_joint: int
    seed: int = field(default=0)

    @property
    def i2(self) -> int:
        return sum(self.s_r) - self.s_joint if len(self.s_r) == 2 else 0


def _cnot(g: GraphState, c: int, t: int) -> None:
    h = g.tables.named["H"]
    g.apply_one_qubit(t, h)
    g.apply_cz(c, t)
    g.apply_one_qubit(t, h)


def entangle_reference(g: GraphState, site: int, ref: int, partner: int) -> None:
    """Swap-in Bell coupling of fresh ``ref`` (in |0>) to ``site``.

    The site's current state is swapped into the fresh ``partner`` slot, then
    ``H`` on ``ref`` and ``CNOT(ref -> site)`` form a Bell pair, so ``S(ref)``
    is exactly one bit right after coupling.
    """
    _cnot(g, site, partner)
    _cnot(g, partner, site)
    _cnot(g, site, partner)
    g.apply_one_qubit(ref, g.tables.named["H"])
    _cnot(g, ref, site)


def probe_trajectory(config: ProbeConfig, n_probes: int = 1) -> ProbeResult:
    base = config.base
    L = base.L
    sites = config.sites(n_probes)
    periodic = base.periodic and not config.surface
    t0, t1 = config.T0, config.T1
    gates, meas_u, coins = draw_circuit(stream(base.seed), L, t0 + t1)
    g = new_zero_state(L + 2 * n_probes)
    p0 = base.p if config.scramble_with_measurements else 0.0
    evolve(g, L, periodic, 0, gates[:t0], meas_u[:t0], coins[:t0], p0)
    refs = [L + 2 * k for k in range(n_probes)]
    for k, x in enumerate(sites):
        entangle_reference(g, x, refs[k], refs[k] + 1)
    evolve(g, L, periodic, t0, gates[t0:], meas_u[t0:], coins[t0:], base.p)
    s_r = tuple(g.entropy_bits([r]) for r in refs)
    return ProbeResult(s_r, g.entropy_bits(refs), base.seed)


def _probe_ensemble(config: ProbeConfig, n_probes, n, master_seed, threads, tag):
    base = config.base
    cfgs = [
        replace(config, base=replace(base, seed=derive_seed(master_seed, tag, base.L, p_label(base.p), k)))
        for k in range(n)
    ]
    return _map(lambda c: probe_trajectory(c, n_probes), cfgs, threads)


def _mean_err(v):
    v = np.asarray(v, dtype=float)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else math.nan


def order_parameter_probe(config: ProbeConfig, n_ensemble: int, master_seed: int = 0, threads: int = 1):
    """Ensemble mean of S(R) in bits; returns ``(mean, stderr, per-run values)``."""
    res = _probe_ensemble(config, 1, n_ensemble, master_seed, threads, 2)
    vals = np.array([r.s_r[0] for r in res])
    return (*_mean_err(vals), vals)


def correlation_probe(config: ProbeConfig, n_ensemble: int, master_seed: int = 0, threads: int = 1):
    """Ensemble mean of I2(R1:R2) in bits; returns ``(mean, stderr, per-run values)``."""
    res = _probe_ensemble(config, 2, n_ensemble, master_seed, threads, 3)
    vals = np.array([r.i2 for r in res])
    return (*_mean_err(vals), vals)
