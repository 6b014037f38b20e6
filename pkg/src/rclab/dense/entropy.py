"""Entanglement spectra and Rényi entropies of dense pure states."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .statevector import DenseState

__all__ = ["schmidt_spectrum", "renyi_entropy", "von_neumann_entropy", "participation_entropy"]

RANK_TOL = 1e-12


def _amps(state) -> np.ndarray:
    return state.amplitudes if isinstance(state, DenseState) else np.asarray(state)


def schmidt_spectrum(state, subset: Iterable[int]) -> np.ndarray:
    """Eigenvalues of the reduced density matrix of ``subset`` (descending)."""
    a = _amps(state)
    n = int(round(np.log2(a.size)))
    A = sorted(set(int(q) for q in subset))
    if any(not 0 <= q < n for q in A):
        raise IndexError("subset index out of range")
    if not A or len(A) == n:
        return np.array([1.0])
    rest = [q for q in range(n) if q not in A]
    psi = np.transpose(a.reshape((2,) * n), A + rest).reshape(2 ** len(A), -1)
    s = np.linalg.svd(psi, compute_uv=False)
    lam = s**2
    return lam / lam.sum()


def renyi_entropy(state, subset: Iterable[int], n: float) -> float:
    """Rényi entropy ``S_n`` in nats.

    ``n = 1`` gives von Neumann, ``n = 0`` the log of the number of
    eigenvalues above ``1e-12``, ``n = inf`` gives ``-ln(lambda_max)``.
    """
    if n < 0:
        raise ValueError("Rényi index must be non-negative")
    lam = schmidt_spectrum(state, subset)
    if n == 0:
        return float(np.log(np.count_nonzero(lam > RANK_TOL)))
    if np.isinf(n):
        return float(-np.log(lam.max()))
    if n == 1:
        lam = lam[lam > 0]
        return float(-np.sum(lam * np.log(lam)))
    return float(np.log(np.sum(lam**n)) / (1.0 - n))


def von_neumann_entropy(state, subset: Iterable[int]) -> float:
    return renyi_entropy(state, subset, 1)


def participation_entropy(state) -> float:
    """``-sum_k p_k ln p_k`` over computational-basis probabilities."""
    p = np.abs(_amps(state)) ** 2
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))
