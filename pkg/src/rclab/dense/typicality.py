"""Typicality estimators for infinite- and finite-temperature correlations.

The infinite-temperature correlation ``C_{l,l'}(t) = tr[S^z_l(t) S^z_{l'}] / 2^L``
is estimated from ``|psi> = |up>_{l'} ⊗ R|0>`` as ``C ≈ <psi(t)|S^z_l|psi(t)> / 2``,
with ``R`` a random grid circuit that skips site ``l'``.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..scaling import log_derivative
from .grid import random_grid_circuit, run_grid_circuit
from .haar import haar_state
from .heisenberg import HeisenbergChain, imaginary_evolve, n_steps, trotter_evolve
from .statevector import MAX_QUBITS, DenseState, sample_indices, sz_expectation, zero_state

__all__ = [
    "CorrelationSeries",
    "typicality_state",
    "typicality_correlation",
    "exact_correlation",
    "sample_and_reconstruct",
    "typicality_trace",
    "thermal_state",
    "thermal_typicality",
    "two_point_typicality",
    "transport_profile",
    "sz_applier",
]


class CorrelationSeries:
    """``values[r, k, j]``: realization ``r``, time ``times[k]``, site ``sites[j]``."""

    def __init__(self, times, sites, values):
        self.times = np.asarray(times, dtype=float)
        self.sites = list(sites)
        self.values = np.asarray(values, dtype=float)

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)


def _check_L(L):
    if L > min(24, MAX_QUBITS):
        raise ValueError("typicality routines are limited to L <= 24")


def typicality_state(chain: HeisenbergChain, excluded: int, rng, depth: int = 20, source: str = "circuit") -> np.ndarray:
    """``|up>_excluded ⊗ R|0>`` from a grid circuit (``source='circuit'``) or Gaussian coefficients."""
    if source == "circuit":
        rows, cols = chain.grid_shape
        g = random_grid_circuit(rows, cols, depth, rng)
        return run_grid_circuit(g, excluded_site=excluded).amplitudes
    if source == "gaussian":
        rest = haar_state(chain.L - 1, rng)
        a = np.zeros(2**chain.L, dtype=complex)
        view = a.reshape(2**excluded, 2, -1)
        view[:, 0, :] = rest.reshape(2**excluded, -1)
        return a
    raise ValueError("source must be 'circuit' or 'gaussian'")


def _time_grid(chain, t_max):
    N = n_steps(t_max, chain.dt)
    return chain.dt * np.arange(N + 1)


def typicality_correlation(
    chain: HeisenbergChain,
    sites: int | Sequence[int],
    excluded: int,
    depth: int,
    t_max: float,
    rng: np.random.Generator,
    n_realizations: int = 1,
    source: str = "circuit",
    order: int = 1,
) -> CorrelationSeries:
    """Per-realization estimates of ``C_{l, excluded}(t)`` at ``t = 0, dt, ..., t_max``."""
    _check_L(chain.L)
    sites = [sites] if np.isscalar(sites) else list(sites)
    times = _time_grid(chain, t_max)
    vals = np.empty((n_realizations, times.size, len(sites)))
    for r in range(n_realizations):
        psi = typicality_state(chain, excluded, rng, depth, source)
        for k in range(times.size):
            if k:
                psi = trotter_evolve(psi, chain, chain.dt, order)
            for j, l in enumerate(sites):
                vals[r, k, j] = 0.5 * sz_expectation(psi, l, chain.L)
    return CorrelationSeries(times, sites, vals)


def exact_correlation(
    chain: HeisenbergChain,
    sites: int | Sequence[int],
    excluded: int,
    t_max: float,
    order: int = 1,
    batch: int = 256,
) -> CorrelationSeries:
    """Exact trace of the Trotterized dynamics by evolving every basis state."""
    L = chain.L
    if L > 14:
        raise ValueError("the exact trace oracle is limited to L <= 14")
    sites = [sites] if np.isscalar(sites) else list(sites)
    times = _time_grid(chain, t_max)
    D = 2**L
    acc = np.zeros((times.size, len(sites)))
    for start in range(0, D, batch):
        idx = np.arange(start, min(D, start + batch))
        psi = np.zeros((idx.size, D), dtype=complex)
        psi[np.arange(idx.size), idx] = 1.0
        s_ex = 0.5 - ((idx >> (L - 1 - excluded)) & 1)  # S^z of the excluded site
        for k in range(times.size):
            if k:
                psi = trotter_evolve(psi, chain, chain.dt, order)
            for j, l in enumerate(sites):
                acc[k, j] += np.sum(s_ex * sz_expectation(psi, l, L))
    return CorrelationSeries(times, sites, (acc / D)[None])


def sample_and_reconstruct(state, site: int, n_samples: int, rng: np.random.Generator) -> float:
    """Estimate of ``2C`` from ``n_samples`` Born samples: ``(f_up - f_down) / 2``."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    a = state.amplitudes if isinstance(state, DenseState) else np.asarray(state)
    n = int(round(np.log2(a.size)))
    idx = sample_indices(a, n_samples, rng)
    down = (idx >> (n - 1 - site)) & 1
    f_down = down.mean()
    return float(0.5 * ((1.0 - f_down) - f_down))


def typicality_trace(apply_op: Callable[[np.ndarray], np.ndarray], n_qubits: int, rng, n_samples: int = 1):
    """``D <psi|O|psi> / <psi|psi>`` over Gaussian random states; returns ``(mean, stderr, samples)``."""
    D = 2**n_qubits
    vals = np.empty(n_samples)
    for s in range(n_samples):
        psi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        vals[s] = (D * np.vdot(psi, apply_op(psi.copy())) / np.vdot(psi, psi)).real
    err = vals.std(ddof=1) / np.sqrt(n_samples) if n_samples > 1 else np.nan
    return float(vals.mean()), float(err), vals


def thermal_state(chain: HeisenbergChain, beta: float, rng, dbeta: float = 0.05) -> np.ndarray:
    """``e^{-beta H / 2}|psi>`` for a Gaussian random ``|psi>`` (unnormalized)."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if chain.L > 16:
        raise ValueError("thermal typicality is limited to L <= 16")
    D = 2**chain.L
    psi = (rng.standard_normal(D) + 1j * rng.standard_normal(D)) / np.sqrt(2)
    return imaginary_evolve(psi, chain, beta / 2, dbeta)


def thermal_typicality(chain, beta, apply_op, rng, n_samples: int = 1, dbeta: float = 0.05):
    """``<psi_b|O|psi_b> / <psi_b|psi_b>`` per sample; returns ``(mean, stderr, samples)``.

    The statistical error of one sample scales as ``1/sqrt(d_eff)`` with
    ``d_eff = tr e^{-beta (H - E0)}``, so it grows as the temperature drops.
    """
    vals = np.empty(n_samples)
    for s in range(n_samples):
        psi = thermal_state(chain, beta, rng, dbeta)
        vals[s] = (np.vdot(psi, apply_op(psi.copy())) / np.vdot(psi, psi)).real
    err = vals.std(ddof=1) / np.sqrt(n_samples) if n_samples > 1 else np.nan
    return float(vals.mean()), float(err), vals


def two_point_typicality(chain, beta, op1, op2, t_max, rng, n_samples: int = 1, dbeta: float = 0.05, order: int = 1):
    """``<psi_b(t)|O1|phi_b(t)> / <psi_b(0)|psi_b(0)>`` on ``t = 0, dt, ..., t_max``.

    Returns ``(times, values[n_samples, n_times])`` (complex).
    """
    times = _time_grid(chain, t_max)
    out = np.empty((n_samples, times.size), dtype=complex)
    for s in range(n_samples):
        psi = thermal_state(chain, beta, rng, dbeta)
        norm = np.vdot(psi, psi).real
        phi = op2(psi.copy())
        for k in range(times.size):
            if k:
                psi = trotter_evolve(psi, chain, chain.dt, order)
                phi = trotter_evolve(phi, chain, chain.dt, order)
            out[s, k] = np.vdot(psi, op1(phi.copy())) / norm
    return times, out


def sz_applier(site: int, L: int):
    sign = 0.5 - ((np.arange(2**L) >> (L - 1 - site)) & 1)

    def apply(amps):
        return amps * sign

    return apply


def transport_profile(times, profiles) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spatial variance and transport exponents of ``C_{l,1}(t)``.

    ``profiles[k, l]`` is ``C_{l,1}`` at ``times[k]`` for sites ``l = 1..L``.
    Returns ``(Sigma2, alpha, beta)`` with ``alpha = -dlnC_{1,1}/dlnt`` and
    ``beta = dlnSigma2/dlnt``; both need ``times > 0``.
    """
    C = np.asarray(profiles, dtype=float)
    t = np.asarray(times, dtype=float)
    norm = C.sum(axis=1)
    if np.any(np.abs(norm) < 1e-14):
        raise ValueError("profile normalization vanishes")
    Ct = C / norm[:, None]
    ell = np.arange(1, C.shape[1] + 1)
    sigma2 = Ct @ ell**2 - (Ct @ ell) ** 2
    sigma2 = np.where(np.abs(sigma2) < 1e-13, 0.0, sigma2)
    pos = t > 0
    alpha = np.full(t.size, np.nan)
    beta = np.full(t.size, np.nan)
    if pos.sum() >= 2:
        if np.all(C[pos, 0] > 0):
            alpha[pos] = -log_derivative(t[pos], C[pos, 0])
        if np.all(sigma2[pos] > 0):
            beta[pos] = log_derivative(t[pos], sigma2[pos])
    return sigma2, alpha, beta
