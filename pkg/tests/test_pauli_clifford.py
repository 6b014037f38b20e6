import itertools

import numpy as np
import pytest
from scipy import stats

from _dense_oracle import PAULI, proportional, word_matrix
from rclab.pauli_clifford import (
    CZ,
    N_TWO,
    Pauli,
    build_tables,
    conjugate_pauli,
    sample_uniform_two_qubit,
)


def pauli_label_of(m):
    """Signed two-qubit Pauli label of a Hermitian Pauli matrix by brute force."""
    for a, b in itertools.product("IXYZ", repeat=2):
        P = np.kron(PAULI[a], PAULI[b])
        c = np.trace(P @ m).real / 4
        if abs(abs(c) - 1) < 1e-9:
            return int(np.sign(c)), a + b
    raise AssertionError("not a Pauli")


def test_group_orders(tables):
    assert len(tables.one_qubit) == 24
    assert len(tables.two_qubit) == 11520


def test_every_two_qubit_word_matches_its_matrix_and_action(tables):
    gens = [np.kron(PAULI["X"], PAULI["I"]), np.kron(PAULI["Z"], PAULI["I"]),
            np.kron(PAULI["I"], PAULI["X"]), np.kron(PAULI["I"], PAULI["Z"])]
    seen = set()
    for c in tables.two_qubit:
        m = word_matrix(c.word)
        assert proportional(m, tables.matrices2[c.id])
        images = tuple(pauli_label_of(m.conj().T @ g @ m) for g in gens)
        assert images == tuple(c.action)
        seen.add(images)
    assert len(seen) == N_TWO


def test_word_lengths(tables):
    lengths = [len(c.word) for c in tables.two_qubit]
    assert max(lengths) == tables.max_word_length
    cz = np.bincount([c.word.count("CZ") for c in tables.two_qubit])
    assert cz.tolist() == [576, 5184, 5184, 576]


def test_one_qubit_products_and_associativity(tables):
    M = tables.matrices1
    for a in range(24):
        for b in range(24):
            assert proportional(M[a] @ M[b], M[tables.mul1[a, b]])
    mul = tables.mul1
    left = mul[mul[:, :, None], np.arange(24)[None, None, :]]
    right = mul[np.arange(24)[:, None, None], mul[None, :, :]]
    assert np.array_equal(left, right)
    for c in range(24):
        assert tables.mul1[c, tables.inverse1(c)] == 0


def test_one_qubit_elements_distinct(tables):
    M = tables.matrices1
    for a, b in itertools.combinations(range(24), 2):
        assert not proportional(M[a], M[b])


def test_conjugation_oracle(tables):
    for c in range(24):
        m = tables.matrices1[c]
        for kind in "XYZ":
            for sign in (1, -1):
                img = conjugate_pauli(c, Pauli(kind, sign), tables)
                assert np.allclose(img.matrix, sign * m.conj().T @ PAULI[kind] @ m)


def test_cz_commuting_one_qubit_elements(tables):
    # CZ (C ⊗ I) = (C ⊗ I) CZ holds only for diagonal C: I, Z, S, S†
    expected = [
        c
        for c in range(24)
        if proportional(CZ @ np.kron(tables.matrices1[c], np.eye(2)), np.kron(tables.matrices1[c], np.eye(2)) @ CZ)
    ]
    assert sorted(np.nonzero(tables.commutes_with_cz)[0].tolist()) == expected
    assert len(expected) == 4


def test_named_elements(tables):
    assert np.allclose(tables.matrices1[tables.named["I"]], np.eye(2))
    for name in ("H", "S", "X", "Y", "Z"):
        ref = {"H": np.array([[1, 1], [1, -1]]) / np.sqrt(2), "S": np.diag([1, 1j])}.get(name, PAULI.get(name))
        assert proportional(tables.matrices1[tables.named[name]], ref)


def test_pauli_algebra():
    phase, p = Pauli("X") * Pauli("Z")
    assert p.kind == "Y" and phase == -1j
    with pytest.raises(ValueError):
        Pauli("Q")
    with pytest.raises(ValueError):
        Pauli("X", 2)


def test_uniform_sampling_chi_square(tables):
    rng = np.random.default_rng(7)
    ids = np.fromiter((sample_uniform_two_qubit(rng, tables).id for _ in range(10**6)), dtype=np.int64)
    counts = np.bincount(ids, minlength=N_TWO)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_cache_roundtrip_and_corruption(tmp_path, tables):
    path = tmp_path / "tables.bin"
    t1 = build_tables(path)
    assert path.exists()
    t2 = build_tables(path)
    assert np.array_equal(t1.cz_lut, t2.cz_lut)
    assert np.array_equal(t2.mul1, tables.mul1)
    blob = bytearray(path.read_bytes())
    blob[-10] ^= 0xFF
    path.write_bytes(bytes(blob))
    t3 = build_tables(path)  # corrupt cache is rebuilt silently
    assert np.array_equal(t3.c2_ops, tables.c2_ops)
