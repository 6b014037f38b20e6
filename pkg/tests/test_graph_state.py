import numpy as np
import pytest
from scipy import stats

import _dense_oracle as D
from rclab.graph_state import (
    GraphState,
    ImpossibleOutcomeError,
    MeasurementOutcome,
    entanglement_entropy_bits,
    local_complementation,
    measure_pauli,
    new_zero_state,
)
from rclab.pauli_clifford import Pauli


def random_circuit_check(tables, rng, n, steps):
    g = new_zero_state(n, tables)
    psi = D.zero(n)
    for _ in range(steps):
        r = rng.random()
        if r < 0.25:
            q, c = int(rng.integers(n)), int(rng.integers(24))
            g.apply_one_qubit(q, c)
            psi = D.apply(psi, n, tables.matrices1[c], [q])
        elif r < 0.5:
            a, b = (int(x) for x in rng.choice(n, 2, replace=False))
            g.apply_cz(a, b)
            psi = D.apply(psi, n, D.CZ, [a, b])
        elif r < 0.8:
            a, b = (int(x) for x in rng.choice(n, 2, replace=False))
            c = tables.two_qubit[int(rng.integers(11520))]
            g.apply_two_qubit(a, b, c)
            psi = D.apply(psi, n, D.word_matrix(c.word), [a, b])
        else:
            q, kind = int(rng.integers(n)), "XYZ"[int(rng.integers(3))]
            P = D.PAULI[kind]
            ev = np.vdot(psi, D.apply(psi, n, P, [q])).real
            o = g.measure(q, kind, rng)
            if o.was_deterministic:
                assert ev == pytest.approx(o.value, abs=1e-9)
            else:
                assert abs(ev) < 1e-9
            psi = D.apply(psi, n, (np.eye(2) + o.value * P) / 2, [q])
            psi /= np.linalg.norm(psi)
        assert D.proportional(g.to_statevector(), psi)
    return g, psi


def test_matches_dense_oracle(tables, rng):
    for _ in range(40):
        g, psi = random_circuit_check(tables, rng, 5, 40)
        for size in (1, 2):
            for sub in (list(range(size)), [4, 1][:size]):
                assert g.entropy_bits(sub) == pytest.approx(D.entropy_bits(psi, 5, sub), abs=1e-9)


def test_zero_state():
    g = new_zero_state(4)
    psi = g.to_statevector()
    assert D.proportional(psi, D.zero(4))
    for q in range(4):
        o = g.measure(q, "Z")
        assert o.value == 1 and o.was_deterministic and o.born_probability == 1.0


def test_bell_and_ghz_entropy(tables):
    g = new_zero_state(4, tables)
    g.apply_one_qubit(0, tables.named["H"])
    for q in range(1, 4):
        g.apply_one_qubit(q, tables.named["H"])
        g.apply_cz(0, q)
        g.apply_one_qubit(q, tables.named["H"])
    ghz = np.zeros(16)
    ghz[[0, 15]] = 1 / np.sqrt(2)
    assert D.proportional(g.to_statevector(), ghz)
    for sub in ([0], [1, 2], [0, 3], [1, 2, 3]):
        assert entanglement_entropy_bits(g, sub) == 1
    assert g.entropy_bits([]) == 0 and g.entropy_bits(range(4)) == 0


def test_measurement_statistics_chi_square(tables):
    # X on |0> gives +-1 with probability 1/2 each
    rng = np.random.default_rng(3)
    n = 4000
    counts = np.zeros(2)
    for _ in range(n):
        g = new_zero_state(2, tables)
        o = measure_pauli(g, 0, "X", rng)
        assert not o.was_deterministic and o.born_probability == 0.5
        counts[(1 - o.value) // 2] += 1
    assert stats.chisquare(counts).pvalue > 1e-3


def test_post_measurement_repeatable(tables, rng):
    g, _ = random_circuit_check(tables, rng, 4, 20)
    for kind in "XYZ":
        first = g.measure(2, kind, rng)
        again = g.measure(2, kind, rng)
        assert again.was_deterministic and again.value == first.value


def test_forced_outcomes(tables):
    g = new_zero_state(2, tables)
    with pytest.raises(ImpossibleOutcomeError):
        g.measure(0, "Z", forced=-1)
    assert g.measure(0, Pauli("Z", -1)).value == -1
    o = g.measure(1, "X", forced=-1)
    assert o.value == -1 and not o.was_deterministic
    assert g.measure(1, "X").value == -1
    with pytest.raises(ValueError):
        g.measure(0, "Z", forced=0)


def test_local_complementation_preserves_state(tables, rng):
    for _ in range(30):
        g, psi = random_circuit_check(tables, rng, 6, 25)
        q = int(rng.integers(6))
        before = g.adjacency().copy()
        local_complementation(g, q)
        assert D.proportional(g.to_statevector(), psi)
        nb = np.nonzero(before[q])[0]
        after = g.adjacency()
        for a in nb:
            for b in nb:
                if a != b:
                    assert after[a, b] != before[a, b]


def test_dump_roundtrip(tables, rng):
    g, psi = random_circuit_check(tables, rng, 5, 30)
    h = GraphState.loads(g.dumps(), tables)
    assert h == g
    assert D.proportional(h.to_statevector(), psi)
    with pytest.raises(ValueError):
        GraphState.loads("nonsense\n")


def test_copy_is_independent(tables):
    g = new_zero_state(3, tables)
    h = g.copy()
    h.apply_one_qubit(0, tables.named["H"])
    h.apply_one_qubit(1, tables.named["H"])
    h.apply_cz(0, 1)
    assert g.edges() == [] and h.edges() == [(0, 1)] and h != g


def test_invalid_arguments(tables):
    g = new_zero_state(3, tables)
    with pytest.raises(IndexError):
        g.apply_cz(0, 3)
    with pytest.raises(ValueError):
        g.apply_cz(1, 1)
    with pytest.raises(ValueError):
        GraphState(0)
    with pytest.raises(ValueError):
        g.set_graph(np.ones((3, 3)))


def test_large_register_crosses_word_boundary(tables, rng):
    # 130 qubits span three 64-bit words; a CZ chain across the boundary
    n = 130
    g = new_zero_state(n, tables)
    h = tables.named["H"]
    for q in range(n):
        g.apply_one_qubit(q, h)
    for q in range(n - 1):
        g.apply_cz(q, q + 1)
    assert g.entropy_bits(range(64)) == 1
    assert g.entropy_bits(range(0, n, 2)) == 65
    # a Z measurement cuts the chain: qubit 10 leaves, 0..9 decouple
    assert isinstance(g.measure(10, "Z", rng), MeasurementOutcome)
    assert g.entropy_bits(range(11)) == 0
    assert g.entropy_bits(range(64)) == 1
