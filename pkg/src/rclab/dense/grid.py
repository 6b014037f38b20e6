"""Random circuits on a 2D grid of qubits with a snake ordering.

Chain index of grid site ``(r, c)`` follows a boustrophedon path: row 0 left
to right, row 1 right to left, and so on::

    0  1  2  3
    7  6  5  4
    8  9 10 11

Two-qubit patterns (cycled A, B, C, D, A, ...)::

    A: (r, c)-(r, c+1), c even      C: (r, c)-(r+1, c), r even
    B: (r, c)-(r, c+1), c odd       D: (r, c)-(r+1, c), r odd

The first site of a pair (left or upper) is the CNOT control.  Each cycle is
a layer of one-qubit gates from {X^1/2, Y^1/2, T} (never repeating the gate a
site received in the previous cycle) followed by one pattern.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import CNOT, CZ, MAX_QUBITS, SQRT_X, SQRT_Y, T_GATE, DenseState, apply_matrix

__all__ = ["GridCircuit", "snake_index", "grid_pairs", "random_grid_circuit", "run_grid_circuit", "grid_shape_for"]

ONE_QUBIT = (SQRT_X, SQRT_Y, T_GATE)
ONE_QUBIT_NAMES = ("X^1/2", "Y^1/2", "T")
PATTERNS = "ABCD"


def snake_index(r: int, c: int, cols: int) -> int:
    return r * cols + (c if r % 2 == 0 else cols - 1 - c)


def grid_pairs(rows: int, cols: int, pattern: str) -> list[tuple[int, int]]:
    """Chain-index pairs of one pattern."""
    out = []
    if pattern in "AB":
        off = 0 if pattern == "A" else 1
        for r in range(rows):
            for c in range(off, cols - 1, 2):
                out.append((snake_index(r, c, cols), snake_index(r, c + 1, cols)))
    elif pattern in "CD":
        off = 0 if pattern == "C" else 1
        for r in range(off, rows - 1, 2):
            for c in range(cols):
                out.append((snake_index(r, c, cols), snake_index(r + 1, c, cols)))
    else:
        raise ValueError(f"unknown pattern {pattern!r}")
    return out


def grid_shape_for(L: int) -> tuple[int, int]:
    """Near-square grid with ``rows >= cols`` holding ``L`` sites (12 -> 4x3, 16 -> 4x4)."""
    best = None
    for cols in range(1, L + 1):
        if L % cols == 0 and L // cols >= cols:
            best = (L // cols, cols)
    return best


@dataclass(frozen=True)
class GridCircuit:
    rows: int
    cols: int
    gates: np.ndarray  # (depth, rows*cols) one-qubit gate ids indexed by chain site
    entangler: str = "CNOT"

    def __post_init__(self):
        if self.rows * self.cols > MAX_QUBITS:
            raise ValueError("grid exceeds the dense qubit limit")
        if self.entangler not in ("CNOT", "CZ"):
            raise ValueError("entangler must be CNOT or CZ")
        if self.gates.shape[1:] != (self.rows * self.cols,):
            raise ValueError("gate table does not match the grid")

    @property
    def depth(self) -> int:
        return self.gates.shape[0]

    @property
    def n(self) -> int:
        return self.rows * self.cols


def random_grid_circuit(rows: int, cols: int, depth: int, rng: np.random.Generator, entangler: str = "CNOT") -> GridCircuit:
    n = rows * cols
    gates = np.zeros((depth, n), dtype=np.int64)
    if depth:
        gates[0] = rng.integers(0, 3, n)
        for k in range(1, depth):
            shift = rng.integers(1, 3, n)
            gates[k] = (gates[k - 1] + shift) % 3
    return GridCircuit(rows, cols, gates, entangler)


def run_grid_circuit(grid: GridCircuit, excluded_site: int | None = None, state: DenseState | None = None) -> DenseState:
    """Apply the circuit to ``|0...0>``, never touching ``excluded_site``."""
    n = grid.n
    st = DenseState.zero(n) if state is None else state
    ent = CNOT if grid.entangler == "CNOT" else CZ
    pairs = {p: grid_pairs(grid.rows, grid.cols, p) for p in PATTERNS}
    for k in range(grid.depth):
        for q in range(n):
            if q != excluded_site:
                apply_matrix(st.amplitudes, ONE_QUBIT[grid.gates[k, q]], (q,), n)
        for a, b in pairs[PATTERNS[k % 4]]:
            if excluded_site not in (a, b):
                apply_matrix(st.amplitudes, ent, (a, b), n)
    return st
