"""Haar-random unitaries and monitored Haar brickwork circuits."""
from __future__ import annotations

import numpy as np

from .entropy import renyi_entropy
from .statevector import apply_matrix, measure_z, DenseState

__all__ = ["haar_unitary", "haar_state", "monitored_haar_run", "HaarRecord"]

MAX_HAAR_L = 20


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Gaussian matrix with the phases of ``diag(R)`` removed."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph[None, :]


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized state with i.i.d. complex Gaussian coefficients."""
    a = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return a / np.linalg.norm(a)


class HaarRecord:
    """Entropies (nats) after each recorded step of a monitored Haar run."""

    def __init__(self, times, s_half, i3):
        self.times = np.asarray(times)
        self.s_half = np.asarray(s_half)
        self.i3 = np.asarray(i3)


def _i3(state, L):
    q = L // 4
    A, B, C = list(range(q)), list(range(q, 2 * q)), list(range(2 * q, 3 * q))
    S = lambda r: renyi_entropy(state, r, 1)  # noqa: E731
    return S(A) + S(B) + S(C) - S(A + B) - S(A + C) - S(B + C) + S(A + B + C)


def monitored_haar_run(
    L: int,
    p: float,
    steps: int,
    rng: np.random.Generator,
    periodic: bool = True,
    record_from: int = 0,
    with_i3: bool = False,
) -> HaarRecord:
    """Haar brickwork with Born-rule Z measurements at rate ``p``.

    Uses the same time-step convention as the Clifford driver: one half
    brickwork layer, then a measurement round.  Records ``S(L/2)`` (and
    optionally the four-arc ``I3``) in nats after steps ``t > record_from``.
    """
    if L > MAX_HAAR_L or L < 2 or L % 2:
        raise ValueError(f"L must be even and at most {MAX_HAAR_L}")
    if with_i3 and L % 4:
        raise ValueError("I3 needs L divisible by 4")
    st = DenseState.zero(L)
    half = list(range(L // 2))
    times, s_half, i3 = [], [], []
    for t in range(steps):
        par = t % 2
        for j in range(L // 2):
            a = 2 * j + par
            b = a + 1
            if b == L:
                if not periodic:
                    continue
                b = 0
            apply_matrix(st.amplitudes, haar_unitary(4, rng), (a, b), L)
        for q in range(L):
            if rng.random() < p:
                measure_z(st, q, rng)
        if t + 1 > record_from:
            times.append(t + 1)
            s_half.append(renyi_entropy(st, half, 1))
            if with_i3:
                i3.append(_i3(st, L))
    return HaarRecord(times, s_half, i3)
