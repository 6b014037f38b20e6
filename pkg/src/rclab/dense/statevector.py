"""Dense statevector kernels.

Qubit ``0`` is the most significant bit of the basis index; ``|0>`` is spin
up.  Amplitude arrays may carry leading batch dimensions, ``(..., 2**n)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DenseState",
    "apply_gate",
    "apply_matrix",
    "zero_state",
    "probabilities",
    "site_probabilities",
    "sz_expectation",
    "measure_z",
    "sample_indices",
    "bitstring",
    "MAX_QUBITS",
    "I2",
    "X",
    "Y",
    "Z",
    "H",
    "CNOT",
    "CZ",
    "SWAP",
    "SQRT_X",
    "SQRT_Y",
    "T_GATE",
]

MAX_QUBITS = 26

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
# pi/2 rotations exp(-i pi/4 P) about the x and y axes, and T = diag(1, e^{i pi/4})
SQRT_X = np.array([[1, -1j], [-1j, 1]], dtype=complex) / np.sqrt(2)
SQRT_Y = np.array([[1, -1], [1, 1]], dtype=complex) / np.sqrt(2)
T_GATE = np.diag([1, np.exp(1j * np.pi / 4)])


@dataclass
class DenseState:
    """``2**n`` complex amplitudes, single owner, mutated in place."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError("amplitude count does not match qubit number")

    @classmethod
    def zero(cls, n: int) -> "DenseState":
        return cls(n, zero_state(n))

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = True) -> "DenseState":
        a = np.asarray(amps, dtype=complex).copy()
        n = int(round(np.log2(a.size)))
        if 2**n != a.size:
            raise ValueError("length must be a power of two")
        if normalize:
            a /= np.linalg.norm(a)
        return cls(n, a)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "DenseState":
        return DenseState(self.n_qubits, self.amplitudes.copy())


def zero_state(n: int) -> np.ndarray:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}]")
    a = np.zeros(2**n, dtype=complex)
    a[0] = 1.0
    return a


def _check_targets(targets, n):
    t = [int(q) for q in targets]
    if len(set(t)) != len(t):
        raise ValueError("targets must be distinct")
    if any(not 0 <= q < n for q in t):
        raise IndexError(f"target out of range for {n} qubits")
    return t


def apply_matrix(amps: np.ndarray, U: np.ndarray, targets, n: int) -> np.ndarray:
    """Apply a 2x2 or 4x4 matrix to ``targets`` of every state in ``amps`` (no checks).

    For two targets ``(a, b)`` the matrix acts on ``|q_a q_b>`` with ``q_a``
    the more significant bit of the 4x4 index.  Returns the updated array
    (written in place when possible).
    """
    batch = amps.shape[:-1]
    psi = amps.reshape((-1,) + (2,) * n)
    k = len(targets)
    axes = [1 + q for q in targets]
    Ut = U.reshape((2,) * (2 * k))
    out = np.tensordot(Ut, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    res = out.reshape(batch + (2**n,))
    if res.dtype == amps.dtype and amps.flags.writeable and amps.flags.c_contiguous:
        amps[...] = res
        return amps
    return res


def apply_gate(state: DenseState, U, targets) -> DenseState:
    """Apply unitary ``U`` (2x2 or 4x4) to ``targets`` in place."""
    U = np.asarray(U, dtype=complex)
    t = _check_targets(targets, state.n_qubits)
    if U.shape != (2 ** len(t), 2 ** len(t)) or len(t) not in (1, 2):
        raise ValueError("expected a 2x2 matrix on one target or a 4x4 on two")
    if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-12, rtol=0):
        raise ValueError("matrix is not unitary within 1e-12")
    apply_matrix(state.amplitudes, U, t, state.n_qubits)
    return state


def probabilities(state) -> np.ndarray:
    a = state.amplitudes if isinstance(state, DenseState) else np.asarray(state)
    return np.abs(a) ** 2


def site_probabilities(amps: np.ndarray, q: int, n: int) -> np.ndarray:
    """Probability of ``|0>`` (spin up) on site ``q``, per batch entry."""
    p = (np.abs(amps) ** 2).reshape(amps.shape[:-1] + (2**q, 2, 2 ** (n - q - 1)))
    up = p[..., 0, :].sum(axis=(-1, -2))
    return up / p.sum(axis=(-1, -2, -3))


def sz_expectation(amps: np.ndarray, q: int, n: int) -> np.ndarray:
    """``<S^z_q> = (P_up - P_down) / 2`` for normalized or unnormalized states."""
    up = site_probabilities(amps, q, n)
    return up - 0.5


def measure_z(state: DenseState, q: int, rng: np.random.Generator) -> int:
    """Born-rule Z measurement; collapses and renormalizes. Returns +1 or -1."""
    n = state.n_qubits
    psi = state.amplitudes.reshape(2**q, 2, 2 ** (n - q - 1))
    p0 = float(np.sum(np.abs(psi[:, 0, :]) ** 2))
    out = 1 if rng.random() < p0 else -1
    keep = 0 if out == 1 else 1
    psi[:, 1 - keep, :] = 0.0
    norm = np.sqrt(p0 if out == 1 else 1.0 - p0)
    psi /= norm
    return out


def sample_indices(state, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    p = probabilities(state)
    p = p / p.sum()
    return rng.choice(p.size, size=n_samples, p=p)


def bitstring(index: int, n: int) -> str:
    return format(int(index), f"0{n}b")
