"""Pure stabilizer states stored as graph states with a local Clifford frame.

A :class:`GraphState` with adjacency ``Γ`` and vertex operators ``C_i``
represents ``(⊗_i C_i) Π_{(i,j)∈E} CZ_ij |+>^n``.  Entanglement of a vertex
subset ``A`` is the GF(2) rank of the off-diagonal block ``Γ_{A,Ā}`` in bits.

Debug dump format (line oriented, ``#`` starts a comment)::

    graphstate <n>
    vops <id_0> <id_1> ... <id_{n-1}>
    <i> <j>          one line per edge, i < j
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _graph_kernels as K
from .pauli_clifford import (
    CliffordOne,
    CliffordTables,
    CliffordTwo,
    Pauli,
    get_tables,
    graph_state_vector,
)

__all__ = [
    "GraphState",
    "MeasurementOutcome",
    "ImpossibleOutcomeError",
    "new_zero_state",
    "apply_one_qubit",
    "apply_cz",
    "apply_two_qubit",
    "measure_pauli",
    "entanglement_entropy_bits",
    "local_complementation",
]


class ImpossibleOutcomeError(ValueError):
    """A forced measurement outcome has zero Born probability."""


@dataclass(frozen=True)
class MeasurementOutcome:
    value: int
    was_deterministic: bool

    @property
    def born_probability(self) -> float:
        return 1.0 if self.was_deterministic else 0.5


def _words(n: int) -> int:
    return max(1, (n + 63) // 64)


class GraphState:
    """Graph state plus vertex operators on ``n`` qubits (single owner, mutable)."""

    def __init__(self, n: int, tables: CliffordTables | None = None):
        if n < 1:
            raise ValueError("a graph state needs at least one qubit")
        self.n = int(n)
        self.tables = tables or get_tables()
        self.tb = _kernel_tables(self.tables)
        self.adj = np.zeros((self.n, _words(self.n)), dtype=np.uint64)
        self.vops = np.zeros(self.n, dtype=np.int64)

    # ---------------------------------------------------------------- helpers
    def _check(self, *qs: int) -> None:
        for q in qs:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range for n={self.n}")

    def copy(self) -> "GraphState":
        other = GraphState.__new__(GraphState)
        other.n, other.tables, other.tb = self.n, self.tables, self.tb
        other.adj = self.adj.copy()
        other.vops = self.vops.copy()
        return other

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix."""
        bits = np.unpackbits(self.adj.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n].astype(np.uint8)

    def edges(self) -> list[tuple[int, int]]:
        a = self.adjacency()
        i, j = np.nonzero(np.triu(a, 1))
        return list(zip(i.tolist(), j.tolist()))

    def set_graph(self, adjacency: np.ndarray, vops: Iterable[int] | None = None) -> "GraphState":
        a = np.asarray(adjacency, dtype=np.uint8) & 1
        if a.shape != (self.n, self.n) or (a != a.T).any() or a.diagonal().any():
            raise ValueError("adjacency must be symmetric with zero diagonal")
        padded = np.zeros((self.n, 64 * self.adj.shape[1]), dtype=np.uint8)
        padded[:, : self.n] = a
        self.adj = np.packbits(padded, axis=1, bitorder="little").view(np.uint64).copy()
        if vops is not None:
            self.vops = np.asarray(list(vops), dtype=np.int64).copy()
        return self

    def to_statevector(self) -> np.ndarray:
        """Dense amplitudes (qubit 0 most significant); feasible for small n only."""
        if self.n > 20:
            raise ValueError("statevector export limited to n <= 20")
        psi = graph_state_vector(self.adjacency()).astype(complex).reshape((2,) * self.n)
        for q in range(self.n):
            m = self.tables.matrices1[self.vops[q]]
            psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [q])), 0, q)
        return psi.reshape(-1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GraphState)
            and self.n == other.n
            and np.array_equal(self.adj, other.adj)
            and np.array_equal(self.vops, other.vops)
        )

    # ------------------------------------------------------------ operations
    def apply_one_qubit(self, q: int, c: CliffordOne | int) -> None:
        self._check(q)
        K.apply_one(self.vops, q, _cid(c), self.tb)

    def apply_cz(self, i: int, j: int) -> None:
        self._check(i, j)
        if i == j:
            raise ValueError("CZ needs two distinct qubits")
        K.apply_cz(self.adj, self.vops, i, j, self.tb)

    def apply_two_qubit(self, i: int, j: int, c: CliffordTwo | int) -> None:
        self._check(i, j)
        if i == j:
            raise ValueError("two-qubit gate needs two distinct qubits")
        K.apply_two(self.adj, self.vops, i, j, _cid(c), self.tb)

    def local_complementation(self, q: int) -> None:
        self._check(q)
        K.local_complement(self.adj, self.vops, q, self.tb)

    def measure(
        self,
        q: int,
        p: Pauli | str = "Z",
        rng: np.random.Generator | None = None,
        forced: int | None = None,
    ) -> MeasurementOutcome:
        """Projectively measure ``p`` on qubit ``q``; see :func:`measure_pauli`."""
        self._check(q)
        p = Pauli(p) if isinstance(p, str) else p
        if p.kind == "I":
            return MeasurementOutcome(p.sign, True)
        if forced not in (None, 1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        coin = 0.0 if forced is not None else (rng or np.random.default_rng()).random()
        f = 0 if forced is None else forced * p.sign
        val, status = K.measure_pauli(self.adj, self.vops, q, p.index, coin, f, self.tb)
        if status == K.CONTRADICTION:
            raise ImpossibleOutcomeError(f"outcome {forced} of {p} on qubit {q} has probability 0")
        return MeasurementOutcome(int(val) * p.sign, status == K.DETERMINISTIC)

    def entropy_bits(self, subset: Iterable[int]) -> int:
        members = np.unique(np.fromiter(subset, dtype=np.int64))
        if members.size == 0 or members.size == self.n:
            return 0
        self._check(int(members[0]), int(members[-1]))
        return int(K.cut_rank(self.adj, members, _mask(members, self.adj.shape[1])))

    # ---------------------------------------------------------------- dumps
    def dumps(self) -> str:
        lines = [f"graphstate {self.n}", "vops " + " ".join(map(str, self.vops.tolist()))]
        lines += [f"{i} {j}" for i, j in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, tables: CliffordTables | None = None) -> "GraphState":
        rows = [ln.split("#")[0].split() for ln in text.splitlines()]
        rows = [r for r in rows if r]
        if len(rows) < 2 or rows[0][0] != "graphstate" or rows[1][0] != "vops":
            raise ValueError("malformed graph-state dump")
        g = cls(int(rows[0][1]), tables)
        vops = [int(v) for v in rows[1][1:]]
        if len(vops) != g.n or not all(0 <= v < 24 for v in vops):
            raise ValueError("vops line does not match qubit count")
        a = np.zeros((g.n, g.n), dtype=np.uint8)
        for r in rows[2:]:
            i, j = int(r[0]), int(r[1])
            a[i, j] = a[j, i] = 1
        return g.set_graph(a, vops)


_TB_CACHE: dict[int, tuple] = {}


def _kernel_tables(t: CliffordTables) -> tuple:
    key = id(t)
    if key not in _TB_CACHE:
        _TB_CACHE[key] = K.kernel_tables(t)
    return _TB_CACHE[key]


def _cid(c) -> int:
    return int(c if isinstance(c, (int, np.integer)) else c.id)


def _mask(members: np.ndarray, W: int) -> np.ndarray:
    mask = np.zeros(W, dtype=np.uint64)
    for m in members.tolist():
        mask[m >> 6] |= np.uint64(1) << np.uint64(m & 63)
    return mask


# functional aliases -------------------------------------------------------
def new_zero_state(n: int, tables: CliffordTables | None = None) -> GraphState:
    """``|0>^n``: the edgeless graph with every vertex operator equal to H."""
    g = GraphState(n, tables)
    g.vops[:] = g.tables.named["H"]
    return g


def apply_one_qubit(state: GraphState, q: int, c: CliffordOne | int) -> None:
    state.apply_one_qubit(q, c)


def apply_cz(state: GraphState, i: int, j: int) -> None:
    state.apply_cz(i, j)


def apply_two_qubit(state: GraphState, i: int, j: int, c: CliffordTwo | int) -> None:
    state.apply_two_qubit(i, j, c)


def measure_pauli(state, q, p, rng=None, forced=None) -> MeasurementOutcome:
    """Measure signed Pauli ``p`` on qubit ``q``.

    The outcome is a fair coin from ``rng`` unless it is deterministic.
    ``forced`` selects a random outcome for replay tests and raises
    :class:`ImpossibleOutcomeError` when it contradicts a deterministic one.
    """
    return state.measure(q, p, rng, forced)


def entanglement_entropy_bits(state: GraphState, subset: Iterable[int]) -> int:
    return state.entropy_bits(subset)


def local_complementation(state: GraphState, q: int) -> None:
    state.local_complementation(q)
