"""Compiled kernels for the graph-state stabilizer engine.

State is a symmetric bit-packed adjacency ``adj[n, W]`` (``uint64``, bit ``j``
of row ``i`` set iff ``i ~ j``) plus one vertex operator id per qubit.  All
table arrays are passed as the tuple returned by :func:`kernel_tables`.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_CTZ_TABLE = np.array(
    [
        0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
        62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
        63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
        46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6,
    ],
    dtype=np.int64,
)

# indices into the table tuple
MUL, CKIND, CSIGN, DIAG, LC, RVW, RVL, LUT, C2OPS, C2N, SPECIAL = range(11)
# SPECIAL layout
SP_H, SP_XH, SP_Z = 0, 1, 2

# measurement status codes
DETERMINISTIC = 1
RANDOM = 0
CONTRADICTION = -1


def kernel_tables(t):
    """Pack a :class:`CliffordTables` into the tuple consumed by the kernels."""
    return (
        np.ascontiguousarray(t.mul1, dtype=np.int64),
        np.ascontiguousarray(t.conj_kind, dtype=np.int64),
        np.ascontiguousarray(t.conj_sign, dtype=np.int64),
        np.ascontiguousarray(t.commutes_with_cz, dtype=np.int64),
        np.array([t.lc_self, t.lc_nbr], dtype=np.int64),
        np.ascontiguousarray(t.rv_word, dtype=np.int64),
        np.ascontiguousarray(t.rv_len, dtype=np.int64),
        np.ascontiguousarray(t.cz_lut, dtype=np.int64),
        np.ascontiguousarray(t.c2_ops, dtype=np.int64),
        np.ascontiguousarray(t.c2_nops, dtype=np.int64),
        np.array([t.named["H"], t.named["XH"], t.named["Z"]], dtype=np.int64),
    )


@njit(cache=True, nogil=True)
def ctz(w):
    low = w & (~w + np.uint64(1))
    return _CTZ_TABLE[(low * _DEBRUIJN) >> np.uint64(58)]


@njit(cache=True, nogil=True)
def has_edge(adj, a, b):
    return (adj[a, b >> 6] >> np.uint64(b & 63)) & np.uint64(1) != 0


@njit(cache=True, nogil=True)
def toggle_edge(adj, a, b):
    adj[a, b >> 6] ^= np.uint64(1) << np.uint64(b & 63)
    adj[b, a >> 6] ^= np.uint64(1) << np.uint64(a & 63)


@njit(cache=True, nogil=True)
def degree(adj, v):
    d = 0
    for w in range(adj.shape[1]):
        x = adj[v, w]
        while x:
            x &= x - np.uint64(1)
            d += 1
    return d


@njit(cache=True, nogil=True)
def lowest_neighbor(adj, v, avoid):
    """Smallest neighbour of ``v`` other than ``avoid``; -1 if none."""
    for w in range(adj.shape[1]):
        x = adj[v, w]
        if avoid >= 0 and (avoid >> 6) == w:
            x &= ~(np.uint64(1) << np.uint64(avoid & 63))
        if x:
            return w * 64 + ctz(x)
    return -1


@njit(cache=True, nogil=True)
def neighbors(adj, v):
    out = np.empty(degree(adj, v), dtype=np.int64)
    k = 0
    for w in range(adj.shape[1]):
        x = adj[v, w]
        while x:
            out[k] = w * 64 + ctz(x)
            k += 1
            x &= x - np.uint64(1)
    return out


@njit(cache=True, nogil=True)
def local_complement(adj, vops, v, tb):
    mul = tb[MUL]
    fx = tb[LC][0]
    fz = tb[LC][1]
    # row v is never modified below: toggles only touch rows of its neighbours
    W = adj.shape[1]
    for w in range(W):
        x = adj[v, w]
        while x:
            a = w * 64 + ctz(x)
            x &= x - np.uint64(1)
            for u in range(W):
                adj[a, u] ^= adj[v, u]
            adj[a, a >> 6] &= ~(np.uint64(1) << np.uint64(a & 63))
            vops[a] = mul[vops[a], fz]
    vops[v] = mul[vops[v], fx]


@njit(cache=True, nogil=True)
def remove_vop(adj, vops, a, b, tb):
    """Reduce ``vops[a]`` to the identity using a neighbour other than ``b``."""
    c = lowest_neighbor(adj, a, b)
    if c < 0:
        return
    v = vops[a]
    for k in range(tb[RVL][v]):
        if tb[RVW][v, k] == 0:
            local_complement(adj, vops, a, tb)
        else:
            local_complement(adj, vops, c, tb)


@njit(cache=True, nogil=True)
def apply_one(vops, q, c, tb):
    vops[q] = tb[MUL][c, vops[q]]


@njit(cache=True, nogil=True)
def apply_cz(adj, vops, a, b, tb):
    if lowest_neighbor(adj, a, b) >= 0:
        remove_vop(adj, vops, a, b, tb)
    if lowest_neighbor(adj, b, a) >= 0:
        remove_vop(adj, vops, b, a, tb)
    if lowest_neighbor(adj, a, b) >= 0:
        remove_vop(adj, vops, a, b, tb)
    diag = tb[DIAG]
    va = vops[a]
    vb = vops[b]
    if diag[va] and diag[vb]:
        toggle_edge(adj, a, b)
        return
    e = 1 if has_edge(adj, a, b) else 0
    lut = tb[LUT]
    e2 = lut[e, va, vb, 0]
    if e2 != e:
        toggle_edge(adj, a, b)
    vops[a] = lut[e, va, vb, 1]
    vops[b] = lut[e, va, vb, 2]


@njit(cache=True, nogil=True)
def apply_two(adj, vops, a, b, cid, tb):
    """Apply two-qubit Clifford ``cid`` to qubits ``(a, b)`` (a is the first factor)."""
    ops = tb[C2OPS]
    for k in range(tb[C2N][cid]):
        if ops[cid, k, 0] == 1:
            apply_cz(adj, vops, a, b, tb)
        else:
            if ops[cid, k, 1]:
                apply_one(vops, a, ops[cid, k, 1], tb)
            if ops[cid, k, 2]:
                apply_one(vops, b, ops[cid, k, 2], tb)


@njit(cache=True, nogil=True)
def isolate(adj, v):
    """Delete every edge at ``v``."""
    for w in range(adj.shape[1]):
        x = adj[v, w]
        while x:
            a = w * 64 + ctz(x)
            x &= x - np.uint64(1)
            adj[a, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        adj[v, w] = np.uint64(0)


@njit(cache=True, nogil=True)
def measure_pauli(adj, vops, q, pk, coin, forced, tb):
    """Measure Pauli ``pk`` (1=X, 2=Y, 3=Z) on qubit ``q``; returns ``(outcome, status)``.

    ``coin`` in [0, 1) decides a random outcome (``< 0.5`` gives the +1
    branch of the bare graph).  ``forced`` in {+1, -1} post-selects the
    physical outcome; 0 leaves it random.  ``status`` is DETERMINISTIC, RANDOM
    or CONTRADICTION (forced outcome has zero probability; state untouched).
    """
    ckind = tb[CKIND]
    csign = tb[CSIGN]
    while True:
        c = vops[q]
        kind = ckind[c, pk]
        s = csign[c, pk]
        if kind == 2:
            local_complement(adj, vops, q, tb)
        elif kind == 1:
            nb = lowest_neighbor(adj, q, -1)
            if nb < 0:
                if forced != 0 and forced != s:
                    return 0, CONTRADICTION
                return s, DETERMINISTIC
            local_complement(adj, vops, nb, tb)
        else:
            break
    if forced != 0:
        lam = forced * s
    else:
        lam = 1 if coin < 0.5 else -1
    sp = tb[SPECIAL]
    mul = tb[MUL]
    if lam < 0:
        for w in range(adj.shape[1]):
            x = adj[q, w]
            while x:
                a = w * 64 + ctz(x)
                x &= x - np.uint64(1)
                vops[a] = mul[vops[a], sp[SP_Z]]
    isolate(adj, q)
    vops[q] = mul[vops[q], sp[SP_H] if lam > 0 else sp[SP_XH]]
    return lam * s, RANDOM


@njit(cache=True, nogil=True)
def gf2_rank(rows):
    """Rank over GF(2) of a bit-packed matrix; ``rows`` is overwritten."""
    m = rows.shape[0]
    W = rows.shape[1]
    rank = 0
    for w in range(W):
        for bit in range(64):
            mask = np.uint64(1) << np.uint64(bit)
            piv = -1
            for i in range(rank, m):
                if rows[i, w] & mask:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for u in range(W):
                    tmp = rows[piv, u]
                    rows[piv, u] = rows[rank, u]
                    rows[rank, u] = tmp
            for i in range(rank + 1, m):
                if rows[i, w] & mask:
                    for u in range(w, W):
                        rows[i, u] ^= rows[rank, u]
            rank += 1
            if rank == m:
                return rank
    return rank


@njit(cache=True, nogil=True)
def cut_rank(adj, members, mask):
    """GF(2) rank of the adjacency block rows ``members`` x columns outside ``mask``.

    For a graph state this is the entanglement entropy of ``members`` in bits.
    """
    m = members.shape[0]
    W = adj.shape[1]
    rows = np.empty((m, W), dtype=np.uint64)
    for i in range(m):
        for u in range(W):
            rows[i, u] = adj[members[i], u] & ~mask[u]
    return gf2_rank(rows)


@njit(cache=True, nogil=True)
def measure_z(adj, vops, q, coin, forced, tb):
    return measure_pauli(adj, vops, q, 3, coin, forced, tb)


@njit(cache=True, nogil=True)
def mask_rank(adj, mask):
    """Entropy in bits of the vertex set encoded by bit mask ``mask``."""
    W = adj.shape[1]
    m = 0
    for u in range(W):
        x = mask[u]
        while x:
            x &= x - np.uint64(1)
            m += 1
    rows = np.empty((m, W), dtype=np.uint64)
    i = 0
    for w in range(W):
        x = mask[w]
        while x:
            v = w * 64 + ctz(x)
            x &= x - np.uint64(1)
            for u in range(W):
                rows[i, u] = adj[v, u] & ~mask[u]
            i += 1
    return gf2_rank(rows)


@njit(cache=True, nogil=True)
def brick_pair(j, parity, L, periodic):
    """Sites of pair ``j`` in a half-brickwork layer; ``(-1, -1)`` if absent."""
    a = 2 * j + parity
    b = a + 1
    if b == L:
        if not periodic:
            return -1, -1
        b = 0
    return a, b


@njit(cache=True, nogil=True)
def run_layers(adj, vops, L, periodic, t0, gates, meas_u, coins, p, record, masks, out, tb):
    """Evolve ``gates.shape[0]`` hybrid time steps on sites ``0..L-1``.

    Step ``t0 + k`` applies two-qubit Cliffords ``gates[k]`` on the half
    brickwork of parity ``(t0 + k) % 2`` and then measures Z on every site
    with ``meas_u[k, q] < p``.  When ``record[k] >= 0`` the entropy of each
    mask is written to ``out[record[k]]``.  Returns the measurement count.
    """
    count = 0
    for k in range(gates.shape[0]):
        parity = (t0 + k) & 1
        for j in range(gates.shape[1]):
            a, b = brick_pair(j, parity, L, periodic)
            if a >= 0:
                apply_two(adj, vops, a, b, gates[k, j], tb)
        for q in range(L):
            if meas_u[k, q] < p:
                measure_pauli(adj, vops, q, 3, coins[k, q], 0, tb)
                count += 1
        r = record[k]
        if r >= 0:
            for m in range(masks.shape[0]):
                out[r, m] = mask_rank(adj, masks[m])
    return count
