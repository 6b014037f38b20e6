"""Pauli operators and the one- and two-qubit Clifford groups.

Both groups are enumerated on first use by breadth-first closure
over generator words and labelled, modulo global phase, by how they conjugate
the Pauli generators.  Every table the graph-state engine needs (products,
conjugation, local-complementation corrections, the two-qubit CZ corner-case
map) is derived here and cross-checked against explicit matrices while it is
built.

Phase convention: ``Y = i X Z``, i.e. the usual ``[[0, -i], [i, 0]]``.  A
signed Pauli ``(kind, sign)`` denotes the Hermitian operator ``sign * P``.

Word convention: a generator word ``(g1, g2, ..., gk)`` is applied in time
order, so the element equals ``gk @ ... @ g2 @ g1`` up to phase.
"""
from __future__ import annotations

import hashlib
import io
import os
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

__all__ = [
    "Pauli",
    "CliffordOne",
    "CliffordTwo",
    "CliffordTables",
    "TableConstructionError",
    "build_tables",
    "get_tables",
    "conjugate_pauli",
    "sample_uniform_two_qubit",
    "PAULI_MATRICES",
    "GENERATORS_TWO",
]

KINDS = "IXYZ"
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
Y = 1j * X @ Z
PAULI_MATRICES = np.array([I2, X, Y, Z])
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
CZ = np.diag([1, 1, 1, -1]).astype(complex)

GENERATORS_TWO = ("H1", "H2", "S1", "S2", "CZ")
_GEN_MATS = {
    "H1": np.kron(H, I2),
    "H2": np.kron(I2, H),
    "S1": np.kron(S, I2),
    "S2": np.kron(I2, S),
    "CZ": CZ,
}
# 16 two-qubit Paulis, index 4*a + b for sigma_a (x) sigma_b
_PAULI16 = np.array([np.kron(a, b) for a in PAULI_MATRICES for b in PAULI_MATRICES])
_TWO_GENERATORS = np.array([_PAULI16[4], _PAULI16[12], _PAULI16[1], _PAULI16[3]])  # X1 Z1 X2 Z2

N_ONE = 24
N_TWO = 11520
TABLE_FORMAT_VERSION = 1
_MAGIC = b"RCLABCT\x00"


class TableConstructionError(RuntimeError):
    """Group enumeration produced an inconsistent table."""


@dataclass(frozen=True)
class Pauli:
    """Signed single-qubit Pauli ``sign * kind`` (``Y = iXZ``)."""

    kind: str
    sign: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Pauli kind {self.kind!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def index(self) -> int:
        return KINDS.index(self.kind)

    @property
    def matrix(self) -> np.ndarray:
        return self.sign * PAULI_MATRICES[self.index]

    def __mul__(self, other: "Pauli") -> tuple[complex, "Pauli"]:
        """Product ``self @ other`` as ``(phase, Pauli)``; phase is in {±1, ±i}."""
        m = self.matrix @ other.matrix
        coef = np.einsum("kij,ji->k", PAULI_MATRICES, m) / 2
        k = int(np.argmax(np.abs(coef)))
        return complex(np.round(coef[k], 12)), Pauli(KINDS[k])

    def __str__(self):
        return ("+" if self.sign > 0 else "-") + self.kind


@dataclass(frozen=True)
class CliffordOne:
    """One-qubit Clifford, labelled by the images ``C† X C`` and ``C† Z C``."""

    id: int
    action: tuple[Pauli, Pauli]
    matrix: np.ndarray = field(compare=False, repr=False)


@dataclass(frozen=True)
class CliffordTwo:
    """Two-qubit Clifford with a generator word over ``{H1, H2, S1, S2, CZ}``.

    ``action`` lists the signed images of X1, Z1, X2, Z2 under ``C† P C`` as
    ``(sign, label)`` pairs, e.g. ``(1, "XZ")``.
    """

    id: int
    word: tuple[str, ...]
    action: tuple[tuple[int, str], ...]


def _decompose(mats: np.ndarray, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Expand Hermitian ±Pauli matrices ``mats[..., d, d]`` in ``basis``.

    Returns (index, sign) arrays; raises if any matrix is not a signed Pauli.
    """
    d = basis.shape[-1]
    coef = np.einsum("pij,...ji->...p", basis, mats) / d
    idx = np.argmax(np.abs(coef), axis=-1)
    val = np.take_along_axis(coef, idx[..., None], axis=-1)[..., 0]
    if not np.allclose(np.abs(val), 1.0, atol=1e-9) or not np.allclose(val.imag, 0, atol=1e-9):
        raise TableConstructionError("conjugation image is not a signed Pauli")
    return idx, np.where(val.real > 0, 1, -1)


def _canonical_phase(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1)
    k = int(np.argmax(np.abs(flat) > 1e-9))
    return m * (abs(flat[k]) / flat[k])


def _images_one(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    conj = np.array([m.conj().T @ P @ m for P in PAULI_MATRICES])
    return _decompose(conj, PAULI_MATRICES)


def _proportional(u: np.ndarray, v: np.ndarray, atol: float = 1e-9) -> bool:
    u = u.reshape(-1)
    v = v.reshape(-1)
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) < atol


def graph_state_vector(adj: np.ndarray) -> np.ndarray:
    """Amplitudes of the bare graph state ``prod CZ_ij |+>^n``; qubit 0 is the most significant bit."""
    adj = np.asarray(adj, dtype=np.int64)
    n = adj.shape[0]
    bits = (np.arange(2**n)[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    parity = np.einsum("ki,ij,kj->k", bits, np.triu(adj, 1), bits) & 1
    return (1 - 2 * parity) / np.sqrt(2**n)


def _apply_local(vec: np.ndarray, ops: list[np.ndarray]) -> np.ndarray:
    n = len(ops)
    psi = vec.reshape((2,) * n)
    for q, op in enumerate(ops):
        psi = np.moveaxis(np.tensordot(op, psi, axes=([1], [q])), 0, q)
    return psi.reshape(-1)


def _enumerate_one() -> tuple[np.ndarray, list[tuple[str, ...]]]:
    mats = [np.eye(2, dtype=complex)]
    words: list[tuple[str, ...]] = [()]
    keys = {_key_one(mats[0]): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for name, g in (("H", H), ("S", S)):
            m = _canonical_phase(g @ mats[i])
            k = _key_one(m)
            if k not in keys:
                keys[k] = len(mats)
                mats.append(m)
                words.append(words[i] + (name,))
                queue.append(keys[k])
    return np.array(mats), words


def _key_one(m: np.ndarray) -> tuple[int, ...]:
    idx, sgn = _images_one(m)
    return (int(idx[1]), int(sgn[1]), int(idx[3]), int(sgn[3]))


def _two_keys(mats: np.ndarray) -> np.ndarray:
    conj = np.einsum("kji,gjl,klm->kgim", mats.conj(), _TWO_GENERATORS, mats)
    idx, sgn = _decompose(conj, _PAULI16)
    code = idx * 2 + (sgn < 0)
    return code[:, 0] + 32 * code[:, 1] + 1024 * code[:, 2] + 32768 * code[:, 3]


def _enumerate_two() -> tuple[np.ndarray, list[tuple[str, ...]], np.ndarray]:
    """Closure ordered by CZ count, then by local word length.

    Each CZ level is first closed under the one-qubit generators, then CZ
    seeds the next level, so every word uses the fewest CZ gates possible.
    Returns matrices, words and action codes.
    """
    mats = [np.eye(4, dtype=complex)]
    words: list[tuple[str, ...]] = [()]
    first = _two_keys(np.array(mats))
    seen = {int(first[0]): 0}
    codes = [int(first[0])]

    def extend(parents: list[int], names) -> list[int]:
        new = []
        block = np.array([mats[i] for i in parents])
        for name in names:
            children = _GEN_MATS[name] @ block
            for j, k in enumerate(_two_keys(children).tolist()):
                if k not in seen:
                    seen[k] = len(mats)
                    mats.append(children[j])
                    words.append(words[parents[j]] + (name,))
                    codes.append(k)
                    new.append(seen[k])
        return new

    seeds = [0]
    while seeds:
        level = list(seeds)
        frontier = seeds
        while frontier:
            frontier = extend(frontier, ("H1", "H2", "S1", "S2"))
            level.extend(frontier)
        seeds = extend(level, ("CZ",))
    return np.array(mats), words, np.array(codes)


def _decode_two_action(code: int) -> tuple[tuple[int, str], ...]:
    out = []
    for _ in range(4):
        c = code % 32
        code //= 32
        idx, neg = divmod(c, 2)
        out.append((-1 if neg else 1, KINDS[idx // 4] + KINDS[idx % 4]))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class CliffordTables:
    """Immutable lookup tables for the one- and two-qubit Clifford groups.

    Array attributes are plain ``numpy`` arrays so the graph-state kernels can
    consume them directly.
    """

    one_qubit: tuple[CliffordOne, ...]
    two_qubit: tuple[CliffordTwo, ...]
    mul1: np.ndarray  # mul1[a, b] = id of (A @ B)
    conj_kind: np.ndarray  # kind of C† P C, indexed [c, P]
    conj_sign: np.ndarray
    commutes_with_cz: np.ndarray
    lc_self: int  # right factor on the complemented vertex
    lc_nbr: int  # right factor on each of its neighbours
    rv_word: np.ndarray  # vop-reduction words (0 = LC at vertex, 1 = LC at partner)
    rv_len: np.ndarray
    cz_lut: np.ndarray  # [edge, vop_a, vop_b] -> (edge', vop_a', vop_b')
    c2_ops: np.ndarray  # compressed layer form of each two-qubit word
    c2_nops: np.ndarray
    matrices1: np.ndarray
    matrices2: np.ndarray
    max_word_length: int
    named: dict = field(default_factory=dict)

    def one(self, name: str) -> CliffordOne:
        return self.one_qubit[self.named[name]]

    def inverse1(self, c: int) -> int:
        return int(np.nonzero(self.mul1[c] == 0)[0][0])


def _lc_factors(mats1: np.ndarray, ids: dict) -> tuple[int, int]:
    """Find the local Clifford corrections of a local complementation.

    Search the four combinations of sqrt(±iX) on the vertex and sqrt(±iZ) on
    its neighbours for the one with |G> ∝ (A_v ⊗ B_N) |tau_v(G)>.
    """
    rng = np.random.default_rng(12345)
    graphs = []
    for n in (3, 4, 5):
        for _ in range(4):
            a = np.triu(rng.integers(0, 2, (n, n)), 1)
            a = a + a.T
            a[0, 1:] = a[1:, 0] = 1
            graphs.append(a)
    for sx in (1, -1):
        for sz in (1, -1):
            A = (I2 + sx * 1j * X) / np.sqrt(2)
            B = (I2 + sz * 1j * Z) / np.sqrt(2)
            ok = True
            for adj in graphs:
                nb = np.nonzero(adj[0])[0]
                tau = adj.copy()
                for i in nb:
                    for j in nb:
                        if i != j:
                            tau[i, j] ^= 1
                ops = [A] + [B if adj[0, q] else I2 for q in range(1, adj.shape[0])]
                if not _proportional(graph_state_vector(adj), _apply_local(graph_state_vector(tau), ops)):
                    ok = False
                    break
            if ok:
                return ids[_key_one(_canonical_phase(A))], ids[_key_one(_canonical_phase(B))]
    raise TableConstructionError("no local-complementation correction matches")


def _reduction_words(mul1: np.ndarray, fx: int, fz: int) -> tuple[np.ndarray, np.ndarray]:
    words = np.zeros((N_ONE, 8), dtype=np.int64)
    lens = np.zeros(N_ONE, dtype=np.int64)
    for start in range(N_ONE):
        prev = {start: None}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            if v == 0:
                break
            for op, f in ((0, fx), (1, fz)):
                w = int(mul1[v, f])
                if w not in prev:
                    prev[w] = (v, op)
                    queue.append(w)
        if 0 not in prev:
            raise TableConstructionError("vertex operator cannot be reduced")
        path = []
        v = 0
        while prev[v] is not None:
            v, op = prev[v]
            path.append(op)
        path.reverse()
        words[start, : len(path)] = path
        lens[start] = len(path)
    return words, lens


def _cz_lookup(mats1: np.ndarray, diag: np.ndarray) -> np.ndarray:
    """Exhaustive map for CZ on a two-vertex subsystem.

    An entry must reproduce CZ (C_a ⊗ C_b) CZ^e |++> and, whenever C_a (C_b) is
    diagonal, the same identity with qubit a (b) left as an open input, since
    that vertex may still carry edges to the rest of the graph.
    """
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    lut = -np.ones((2, N_ONE, N_ONE, 3), dtype=np.int64)
    cands = []
    for e in (0, 1):
        ce = CZ if e else np.eye(4)
        for a in range(N_ONE):
            for b in range(N_ONE):
                cands.append((e, a, b, np.kron(mats1[a], mats1[b]) @ ce))
    cmats = np.array([c[3] for c in cands])
    state_c = cmats @ np.kron(plus, plus)
    open_a = (cmats @ np.kron(I2, plus[:, None])).reshape(len(cands), -1)
    open_b = (cmats @ np.kron(plus[:, None], I2)).reshape(len(cands), -1)

    def matches(target, pool):
        ov = np.abs(pool.conj() @ target)
        return np.abs(ov - np.linalg.norm(pool, axis=1) * np.linalg.norm(target)) < 1e-9

    for e, a, b, m in cands:
        if diag[a] and diag[b]:
            continue
        m_in = CZ @ m
        ok = matches(m_in @ np.kron(plus, plus), state_c)
        if diag[a]:
            ok &= matches((m_in @ np.kron(I2, plus[:, None])).reshape(-1), open_a)
        if diag[b]:
            ok &= matches((m_in @ np.kron(plus[:, None], I2)).reshape(-1), open_b)
        hits = np.nonzero(ok)[0]
        if hits.size == 0:
            raise TableConstructionError(f"no CZ lookup entry for edge={e} vops=({a},{b})")
        k = int(hits[0])
        lut[e, a, b] = cands[k][:3]
    return lut


def _compress_word(word: tuple[str, ...], ids1: dict[str, int], mul1: np.ndarray) -> list[tuple[int, int, int]]:
    ops = []
    c1 = c2 = 0
    for g in word:
        if g == "CZ":
            if c1 or c2:
                ops.append((0, c1, c2))
            ops.append((1, 0, 0))
            c1 = c2 = 0
        elif g.endswith("1"):
            c1 = int(mul1[ids1[g[0]], c1])
        else:
            c2 = int(mul1[ids1[g[0]], c2])
    if c1 or c2:
        ops.append((0, c1, c2))
    return ops


def _build_arrays() -> dict[str, np.ndarray]:
    mats1, _ = _enumerate_one()
    if len(mats1) != N_ONE:
        raise TableConstructionError(f"one-qubit group has {len(mats1)} elements, expected {N_ONE}")
    ids = {_key_one(m): i for i, m in enumerate(mats1)}
    mul1 = np.empty((N_ONE, N_ONE), dtype=np.int64)
    for a in range(N_ONE):
        for b in range(N_ONE):
            mul1[a, b] = ids[_key_one(_canonical_phase(mats1[a] @ mats1[b]))]
    conj_kind = np.empty((N_ONE, 4), dtype=np.int64)
    conj_sign = np.empty((N_ONE, 4), dtype=np.int64)
    for c in range(N_ONE):
        conj_kind[c], conj_sign[c] = _images_one(mats1[c])
    commutes = np.array(
        [_proportional(np.kron(m, I2) @ CZ, CZ @ np.kron(m, I2)) for m in mats1]
    )
    named = {
        name: ids[_key_one(_canonical_phase(m))]
        for name, m in (("I", I2), ("H", H), ("S", S), ("X", X), ("Y", Y), ("Z", Z), ("XH", X @ H))
    }
    fx, fz = _lc_factors(mats1, ids)
    rv_word, rv_len = _reduction_words(mul1, fx, fz)
    lut = _cz_lookup(mats1, commutes)

    mats2, words2, codes2 = _enumerate_two()
    if len(mats2) != N_TWO:
        raise TableConstructionError(f"two-qubit group has {len(mats2)} elements, expected {N_TWO}")
    maxlen = max(len(w) for w in words2)
    gen_index = {g: i for i, g in enumerate(GENERATORS_TWO)}
    word_arr = -np.ones((N_TWO, maxlen), dtype=np.int8)
    for i, w in enumerate(words2):
        word_arr[i, : len(w)] = [gen_index[g] for g in w]
    one_ids = {"H": named["H"], "S": named["S"]}
    compressed = [_compress_word(w, one_ids, mul1) for w in words2]
    max_ops = max(len(c) for c in compressed)
    c2_ops = np.zeros((N_TWO, max_ops, 3), dtype=np.int64)
    c2_nops = np.zeros(N_TWO, dtype=np.int64)
    for i, c in enumerate(compressed):
        if c:
            c2_ops[i, : len(c)] = c
        c2_nops[i] = len(c)
    return {
        "mats1": mats1,
        "mul1": mul1,
        "conj_kind": conj_kind,
        "conj_sign": conj_sign,
        "commutes": commutes,
        "named_keys": np.array(list(named.values()), dtype=np.int64),
        "lc": np.array([fx, fz], dtype=np.int64),
        "rv_word": rv_word,
        "rv_len": rv_len,
        "cz_lut": lut,
        "mats2": mats2,
        "words2": word_arr,
        "codes2": codes2.astype(np.int64),
        "c2_ops": c2_ops,
        "c2_nops": c2_nops,
    }


_NAMES = ("I", "H", "S", "X", "Y", "Z", "XH")


def _tables_from_arrays(arr: dict[str, np.ndarray]) -> CliffordTables:
    mats1 = arr["mats1"]
    one = tuple(
        CliffordOne(
            c,
            (
                Pauli(KINDS[arr["conj_kind"][c, 1]], int(arr["conj_sign"][c, 1])),
                Pauli(KINDS[arr["conj_kind"][c, 3]], int(arr["conj_sign"][c, 3])),
            ),
            mats1[c],
        )
        for c in range(N_ONE)
    )
    words = arr["words2"]
    two = tuple(
        CliffordTwo(
            i,
            tuple(GENERATORS_TWO[g] for g in words[i] if g >= 0),
            _decode_two_action(int(arr["codes2"][i])),
        )
        for i in range(N_TWO)
    )
    for a in arr.values():
        a.setflags(write=False)
    return CliffordTables(
        one_qubit=one,
        two_qubit=two,
        mul1=arr["mul1"],
        conj_kind=arr["conj_kind"],
        conj_sign=arr["conj_sign"],
        commutes_with_cz=arr["commutes"],
        lc_self=int(arr["lc"][0]),
        lc_nbr=int(arr["lc"][1]),
        rv_word=arr["rv_word"],
        rv_len=arr["rv_len"],
        cz_lut=arr["cz_lut"],
        c2_ops=arr["c2_ops"],
        c2_nops=arr["c2_nops"],
        matrices1=mats1,
        matrices2=arr["mats2"],
        max_word_length=int((words >= 0).sum(axis=1).max()),
        named=dict(zip(_NAMES, arr["named_keys"].tolist())),
    )


# Cache file layout: 8-byte magic, uint32 format version (little endian),
# 32-byte SHA-256 of the payload, then the payload as an ``.npz`` archive.
def _dump_cache(path: Path, arr: dict[str, np.ndarray]) -> None:
    buf = io.BytesIO()
    np.savez(buf, **arr)
    payload = buf.getvalue()
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(
        _MAGIC + TABLE_FORMAT_VERSION.to_bytes(4, "little") + hashlib.sha256(payload).digest() + payload
    )
    os.replace(tmp, path)


def _load_cache(path: Path) -> dict[str, np.ndarray] | None:
    try:
        blob = path.read_bytes()
    except OSError:
        return None
    head = len(_MAGIC) + 4 + 32
    if len(blob) < head or blob[: len(_MAGIC)] != _MAGIC:
        return None
    if int.from_bytes(blob[len(_MAGIC) : len(_MAGIC) + 4], "little") != TABLE_FORMAT_VERSION:
        return None
    digest, payload = blob[len(_MAGIC) + 4 : head], blob[head:]
    if hashlib.sha256(payload).digest() != digest:
        return None
    with np.load(io.BytesIO(payload)) as z:
        return {k: z[k] for k in z.files}


def build_tables(cache: str | os.PathLike | None = None) -> CliffordTables:
    """Enumerate both Clifford groups and derive every lookup table.

    With ``cache`` set, a valid cache file is loaded instead of enumerating;
    a missing, stale or corrupt file is regenerated.
    """
    arr = None
    if cache is not None:
        arr = _load_cache(Path(cache))
    if arr is None:
        arr = _build_arrays()
        if cache is not None:
            _dump_cache(Path(cache), arr)
    return _tables_from_arrays(arr)


def default_cache_path() -> Path | None:
    """``$RCLAB_TABLE_CACHE`` if set (empty disables caching), else a per-user cache file."""
    env = os.environ.get("RCLAB_TABLE_CACHE")
    if env is not None:
        return Path(env) if env else None
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "rclab" / f"clifford_tables_v{TABLE_FORMAT_VERSION}.bin"


@lru_cache(maxsize=1)
def get_tables() -> CliffordTables:
    """Process-wide tables, loaded from :func:`default_cache_path` when valid."""
    path = default_cache_path()
    try:
        return build_tables(path)
    except OSError:
        return build_tables(None)


def conjugate_pauli(c: CliffordOne | int, p: Pauli, tables: CliffordTables | None = None) -> Pauli:
    """Return the signed Pauli ``C† P C``."""
    t = tables or get_tables()
    cid = c if isinstance(c, int) else c.id
    k = p.index
    return Pauli(KINDS[t.conj_kind[cid, k]], p.sign * int(t.conj_sign[cid, k]))


def sample_uniform_two_qubit(rng: np.random.Generator, tables: CliffordTables | None = None) -> CliffordTwo:
    t = tables or get_tables()
    return t.two_qubit[int(rng.integers(N_TWO))]
