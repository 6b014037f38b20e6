"""Minimal statevector oracle independent of the package (qubit 0 = most significant bit)."""
import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
CZ = np.diag([1, 1, 1, -1]).astype(complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
GEN = {
    "H1": np.kron(H, I2),
    "H2": np.kron(I2, H),
    "S1": np.kron(S, I2),
    "S2": np.kron(I2, S),
    "CZ": CZ,
}


def zero(n):
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    return psi


def apply(psi, n, m, qs):
    k = len(qs)
    t = np.tensordot(m.reshape((2,) * 2 * k), psi.reshape((2,) * n), axes=(list(range(k, 2 * k)), list(qs)))
    return np.moveaxis(t, list(range(k)), list(qs)).reshape(-1)


def word_matrix(word):
    m = np.eye(4, dtype=complex)
    for g in word:
        m = GEN[g] @ m
    return m


def proportional(u, v, atol=1e-9):
    u, v = np.ravel(u), np.ravel(v)
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) < atol


def entropy_bits(psi, n, subset):
    subset = sorted(subset)
    rest = [q for q in range(n) if q not in subset]
    m = np.moveaxis(psi.reshape((2,) * n), subset + rest, list(range(n))).reshape(2 ** len(subset), -1)
    sv = np.linalg.svd(m, compute_uv=False)
    p = sv[sv > 1e-9] ** 2
    return float(-(p * np.log2(p)).sum())
