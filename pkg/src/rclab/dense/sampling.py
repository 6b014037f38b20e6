"""Output-distribution statistics of random circuits: Porter-Thomas and XEB."""
from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .statevector import DenseState, bitstring, sample_indices

__all__ = [
    "ZeroProbabilityError",
    "porter_thomas_pdf",
    "porter_thomas_cdf",
    "porter_thomas_test",
    "xeb",
    "sample_counts",
]


class ZeroProbabilityError(ValueError):
    """A sampled bitstring has zero ideal probability."""


def porter_thomas_pdf(z, D: int):
    """``p(z) = (D-1)(1-z)^(D-2)`` on ``[0, 1]``."""
    z = np.asarray(z, dtype=float)
    return np.where((z >= 0) & (z <= 1), (D - 1) * np.clip(1 - z, 0, 1) ** (D - 2), 0.0)


def porter_thomas_cdf(z, D: int):
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    return 1.0 - (1.0 - z) ** (D - 1)


def porter_thomas_test(states: DenseState | np.ndarray | Sequence, bins: int = 50, support=None):
    """Histogram of ``z = |c_k|^2`` and the KS distance to the Porter-Thomas law.

    ``states`` may be one state or several of equal dimension, pooled.
    ``support`` optionally selects the basis indices that carry the random
    state (for example, one half when a site is kept in ``|0>``); ``D`` is
    the size of that support.  Returns ``((counts, edges), ks)``.
    """
    if isinstance(states, DenseState) or (isinstance(states, np.ndarray) and states.ndim == 1):
        states = [states]
    zs = []
    for s in states:
        a = s.amplitudes if isinstance(s, DenseState) else np.asarray(s)
        if support is not None:
            a = a[support]
        zs.append(np.abs(a) ** 2)
    D = zs[0].size
    z = np.concatenate(zs)
    ks = float(stats.kstest(z, lambda x: porter_thomas_cdf(x, D)).statistic)
    hist = np.histogram(z * D, bins=bins, range=(0.0, 10.0))
    return hist, ks


def xeb(samples: Iterable[int], ideal_probs: np.ndarray) -> float:
    """``-(1/N) sum_k ln p(k)`` over sampled basis indices."""
    p = np.asarray(ideal_probs, dtype=float)
    if not np.isclose(p.sum(), 1.0, atol=1e-9):
        raise ValueError("ideal probabilities are not normalized")
    idx = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("no samples")
    ps = p[idx]
    bad = np.nonzero(ps <= 0)[0]
    if bad.size:
        n = int(round(np.log2(p.size)))
        raise ZeroProbabilityError(f"sample {bitstring(idx[bad[0]], n)} has zero ideal probability")
    return float(-np.mean(np.log(ps)))


def sample_counts(state: DenseState, n_samples: int, rng: np.random.Generator) -> list[tuple[str, int]]:
    """Born-rule samples aggregated as ``(bitstring, count)`` sorted by bitstring."""
    idx = sample_indices(state, n_samples, rng)
    c = Counter(idx.tolist())
    return [(bitstring(k, state.n_qubits), v) for k, v in sorted(c.items())]
