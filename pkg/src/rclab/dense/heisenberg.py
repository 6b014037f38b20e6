"""Spin-1/2 Heisenberg chain: exact bond propagators and Trotter evolution.

``H = sum_l S_l . S_{l+1}`` on an open chain.  On one bond
``S.S = (2 SWAP - 1)/4``, so

    exp(-i dt S.S) = e^{i dt/4} (cos(dt/2) 1 - i sin(dt/2) SWAP)
    exp(-tau S.S)  = e^{tau/4} (cosh(tau/2) 1 - sinh(tau/2) SWAP)

Both conserve total ``S^z``.  Bond ``(l, l+1)`` is even when ``l`` is even.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import grid_shape_for
from .statevector import I2, SWAP, X, Y, Z, apply_matrix

__all__ = [
    "HeisenbergChain",
    "bond_propagator",
    "bond_imaginary_propagator",
    "trotter_evolve",
    "imaginary_evolve",
    "hamiltonian_sparse",
    "bond_energy",
    "apply_hamiltonian",
]

ID4 = np.eye(4, dtype=complex)
BOND_H = 0.25 * (np.kron(X, X) + np.kron(Y, Y) + np.kron(Z, Z))


@dataclass(frozen=True)
class HeisenbergChain:
    L: int
    dt: float = 0.5
    grid: tuple[int, int] | None = None  # (rows, cols) for the random-circuit layout

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("chain needs at least two sites")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.grid if self.grid is not None else grid_shape_for(self.L)

    def bonds(self, parity: int) -> list[tuple[int, int]]:
        return [(l, l + 1) for l in range(parity, self.L - 1, 2)]


def bond_propagator(dt: float) -> np.ndarray:
    return np.exp(1j * dt / 4) * (np.cos(dt / 2) * ID4 - 1j * np.sin(dt / 2) * SWAP)


def bond_imaginary_propagator(tau: float) -> np.ndarray:
    return np.exp(tau / 4) * (np.cosh(tau / 2) * ID4 - np.sinh(tau / 2) * SWAP)


def _layer(amps, U, chain, parity):
    for a, b in chain.bonds(parity):
        amps = apply_matrix(amps, U, (a, b), chain.L)
    return amps


def n_steps(t: float, dt: float) -> int:
    n = t / dt
    k = int(round(n))
    if abs(n - k) > 1e-9 * max(1.0, abs(n)):
        raise ValueError(f"t = {t} is not an integer multiple of dt = {dt}")
    return k


def trotter_evolve(amps: np.ndarray, chain: HeisenbergChain, t: float, order: int = 1) -> np.ndarray:
    """Evolve ``amps`` (batch allowed) to time ``t``.

    ``order=1`` applies ``(e^{-i H_e dt} e^{-i H_o dt})^N``; ``order=2`` uses
    the symmetric split ``e^{-i H_o dt/2} e^{-i H_e dt} e^{-i H_o dt/2}``.
    """
    N = n_steps(t, chain.dt)
    if order == 1:
        U = bond_propagator(chain.dt)
        for _ in range(N):
            amps = _layer(amps, U, chain, 1)
            amps = _layer(amps, U, chain, 0)
    elif order == 2:
        Uh = bond_propagator(chain.dt / 2)
        U = bond_propagator(chain.dt)
        for _ in range(N):
            amps = _layer(amps, Uh, chain, 1)
            amps = _layer(amps, U, chain, 0)
            amps = _layer(amps, Uh, chain, 1)
    else:
        raise ValueError("order must be 1 or 2")
    return amps


def imaginary_evolve(amps: np.ndarray, chain: HeisenbergChain, tau: float, dtau: float = 0.05) -> np.ndarray:
    """Apply ``e^{-tau H}`` by symmetric split steps of size at most ``dtau``."""
    if tau < 0:
        raise ValueError("imaginary time must be non-negative")
    if tau == 0:
        return amps
    m = int(np.ceil(tau / dtau - 1e-12))
    d = tau / m
    Uh = bond_imaginary_propagator(d / 2)
    U = bond_imaginary_propagator(d)
    for _ in range(m):
        amps = _layer(amps, Uh, chain, 1)
        amps = _layer(amps, U, chain, 0)
        amps = _layer(amps, Uh, chain, 1)
    return amps


def _site_op(op, q, L):
    return sp.kron(sp.kron(sp.identity(2**q), sp.csr_matrix(op)), sp.identity(2 ** (L - q - 1)), format="csr")


def hamiltonian_sparse(chain: HeisenbergChain) -> sp.csr_matrix:
    L = chain.L
    H = sp.csr_matrix((2**L, 2**L), dtype=complex)
    for l in range(L - 1):
        H = H + sp.kron(
            sp.kron(sp.identity(2**l), sp.csr_matrix(BOND_H)), sp.identity(2 ** (L - l - 2)), format="csr"
        )
    return H


def apply_hamiltonian(amps: np.ndarray, chain: HeisenbergChain) -> np.ndarray:
    out = np.zeros_like(amps)
    for l in range(chain.L - 1):
        out = out + apply_matrix(amps.copy(), BOND_H, (l, l + 1), chain.L)
    return out


def bond_energy(l: int, L: int):
    """Applier for ``S_l . S_{l+1}``."""

    def apply(amps):
        return apply_matrix(np.array(amps, dtype=complex, copy=True), BOND_H, (l, l + 1), L)

    return apply
