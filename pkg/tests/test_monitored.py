import numpy as np
import pytest

import _dense_oracle as D
from _mincut_oracle import brute_force_cut
from rclab.graph_state import new_zero_state
from rclab.mincut import hartley_min_cut, leg_costs
from rclab.monitored import (
    CircuitConfig,
    arcs,
    draw_circuit,
    evolve,
    mutual_information,
    run_ensemble,
    run_trajectory,
    steady_state,
    tripartite_information,
)
from rclab.rng import derive_seed, p_label, stream


def final_state(L, p, T, seed, periodic=True):
    gates, meas_u, coins = draw_circuit(stream(seed), L, T)
    g = new_zero_state(L)
    evolve(g, L, periodic, 0, gates, meas_u, coins, p)
    return g, meas_u < p


def test_trajectory_is_reproducible():
    cfg = CircuitConfig(16, 0.15, seed=99)
    a, b = run_trajectory(cfg), run_trajectory(cfg)
    assert np.array_equal(a.i3, b.i3) and np.array_equal(a.s_half, b.s_half)
    assert a.measurement_count == b.measurement_count


def test_ensemble_independent_of_thread_count():
    e1 = run_ensemble(16, 0.2, 6, master_seed=5, threads=1)
    e2 = run_ensemble(16, 0.2, 6, master_seed=5, threads=3)
    for a, b in zip(e1, e2):
        assert a.config.seed == b.config.seed
        assert np.array_equal(a.i3, b.i3)
    assert len({r.config.seed for r in e1}) == 6
    assert e1[0].config.seed == derive_seed(5, 16, p_label(0.2), 0)


def test_full_measurement_disentangles():
    rec = run_trajectory(CircuitConfig(16, 1.0, seed=1))
    assert np.all(rec.s_half == 0) and np.all(rec.i3 == 0)
    assert rec.measurement_count == 16 * rec.config.T


def test_unitary_dynamics_reaches_volume_law():
    rec = run_trajectory(CircuitConfig(16, 0.0, seed=2))
    assert rec.measurement_count == 0
    assert rec.s_half[-1] >= 16 // 2 - 2
    assert rec.i3[-1] < 0


def test_measurement_count_binomial():
    rec = run_trajectory(CircuitConfig(32, 0.3, seed=4))
    n = 32 * rec.config.T
    assert abs(rec.measurement_count - 0.3 * n) < 5 * np.sqrt(n * 0.3 * 0.7)


def test_i3_symmetric_under_permutation_and_matches_record():
    L = 16
    cfg = CircuitConfig(L, 0.1, seed=11, steps=24)
    rec = run_trajectory(cfg)
    g, _ = final_state(L, 0.1, 24, 11)
    A, B, C, _ = arcs(L)
    i3 = tripartite_information(g)
    assert i3 == rec.i3[-1]
    for perm in ((B, A, C), (C, B, A), (A, C, B)):
        assert tripartite_information(g, perm) == i3
    assert g.entropy_bits(np.r_[A, B]) == rec.s_half[-1]


def test_mutual_information_matches_dense():
    for seed in range(20):
        g, _ = final_state(8, 0.15, 10, seed)
        psi = g.to_statevector()
        A, B = [0, 1], [4, 5, 6]
        ref = D.entropy_bits(psi, 8, A) + D.entropy_bits(psi, 8, B) - D.entropy_bits(psi, 8, A + B)
        assert mutual_information(g, A, B) == pytest.approx(ref, abs=1e-9)
    with pytest.raises(ValueError):
        mutual_information(g, [0, 1], [1, 2])


def test_steady_state_window():
    recs = run_ensemble(8, 0.5, 4, record_from=16)
    m, e, vals = steady_state(recs, "s_half", window=8)
    assert vals.shape == (4,) and np.isfinite(e)
    assert m == pytest.approx(vals.mean())


def test_config_validation():
    for bad in (dict(L=5, p=0.1), dict(L=8, p=1.5), dict(L=8, p=0.1, boundary="x"), dict(L=8, p=0.1, steps=0)):
        with pytest.raises(ValueError):
            CircuitConfig(**bad)
    with pytest.raises(ValueError):
        arcs(10)


def test_min_cut_matches_brute_force():
    rng = np.random.default_rng(8)
    for _ in range(120):
        L = int(rng.choice([4, 6]))
        T = int(rng.integers(1, 5))
        periodic = bool(rng.integers(2))
        meas = rng.random((T, L)) < rng.uniform(0, 0.5)
        s, n = int(rng.integers(L)), int(rng.integers(1, L))
        region = [(s + k) % L for k in range(n)] if periodic else list(range(s, min(L, s + n)))
        got = hartley_min_cut(L, T, meas, region, "periodic" if periodic else "open")
        assert got == brute_force_cut(L, T, meas, region, periodic)


def test_min_cut_bounds_stabilizer_entropy():
    for seed in range(60):
        for periodic in (True, False):
            L, T = 8, 8
            g, meas = final_state(L, 0.2, T, seed, periodic)
            for region in (range(4), range(2, 5), [0]):
                cut = hartley_min_cut(L, T, meas, region, "periodic" if periodic else "open")
                assert g.entropy_bits(region) <= cut


def test_min_cut_unmeasured_values():
    none = np.zeros((16, 16), dtype=bool)
    # light cone: each endpoint gains 2 bits per two steps until |A| = 8 caps it
    assert [hartley_min_cut(16, T, none[:T], range(8), "open") for T in range(1, 10)] == [0, 2, 2, 4, 4, 6, 6, 8, 8]
    assert [hartley_min_cut(16, T, none[:T], range(8), "periodic") for T in range(1, 6)] == [0, 4, 4, 8, 8]
    assert hartley_min_cut(16, 16, none, range(16), "open") == 0
    with pytest.raises(ValueError):
        leg_costs(4, 3, np.zeros((2, 4)), False)
