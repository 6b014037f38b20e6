import math

import numpy as np
import pytest

import _dense_oracle as D
from rclab.graph_state import new_zero_state
from rclab.monitored import CircuitConfig, draw_circuit, evolve
from rclab.purification import (
    NOT_PURIFIED,
    ProbeConfig,
    PurificationConfig,
    correlation_probe,
    entangle_reference,
    order_parameter_probe,
    probe_trajectory,
    purification_ensemble,
    purification_run,
)
from rclab.rng import stream


def test_unitary_dynamics_never_purifies():
    res = purification_run(PurificationConfig(CircuitConfig(8, 0.0, seed=3)), stop_early=False)
    assert res.t_p == NOT_PURIFIED
    assert np.all(res.s_ref == 8)


def test_full_measurement_purifies_in_one_step():
    res = purification_run(PurificationConfig(CircuitConfig(8, 1.0, seed=3)))
    assert res.t_p == 1
    assert res.s_ref[0] == 0


def test_reference_entropy_monotone():
    for seed in range(10):
        res = purification_run(PurificationConfig(CircuitConfig(16, 0.12, seed=seed)), stop_early=False)
        assert np.all(np.diff(res.s_ref) <= 0)
        assert res.s_ref.size == 64
        if math.isfinite(res.t_p):
            k = int(res.t_p) - 1
            assert res.s_ref[k] <= 0.5 and (k == 0 or res.s_ref[k - 1] > 0.5)


def test_stop_early_agrees_with_full_run():
    cfg = PurificationConfig(CircuitConfig(16, 0.3, seed=21))
    a, b = purification_run(cfg, True), purification_run(cfg, False)
    assert a.t_p == b.t_p
    assert np.array_equal(a.s_ref, b.s_ref[: a.s_ref.size])


def test_ensemble_reproducible():
    a = purification_ensemble(8, 0.25, 5, master_seed=4)
    b = purification_ensemble(8, 0.25, 5, master_seed=4, threads=2)
    assert [r.t_p for r in a] == [r.t_p for r in b]


def test_entangle_reference_makes_bell_pair(tables):
    rng = np.random.default_rng(0)
    for _ in range(20):
        L = 4
        g = new_zero_state(L + 2, tables)
        gates, meas_u, coins = draw_circuit(rng, L, 6)
        evolve(g, L, True, 0, gates, meas_u, coins, 0.2)
        before = g.to_statevector()
        entangle_reference(g, 1, L, L + 1)
        assert g.entropy_bits([L]) == 1
        # the site's previous state now lives on the partner slot
        sys_before = D.entropy_bits(before, L + 2, [1])
        assert g.entropy_bits([L + 1]) == pytest.approx(sys_before, abs=1e-9)


def test_probe_limits():
    one = ProbeConfig(CircuitConfig(16, 0.0, seed=1))
    assert probe_trajectory(one).s_r == (1,)
    assert probe_trajectory(ProbeConfig(CircuitConfig(16, 1.0, seed=1))).s_r == (0,)


def test_probe_mutual_information_bounds():
    cfg = ProbeConfig(CircuitConfig(16, 0.16))
    m, e, vals = correlation_probe(cfg, 30, master_seed=2)
    assert vals.min() >= 0 and vals.max() <= 2
    m1, e1, v1 = order_parameter_probe(cfg, 30, master_seed=2)
    assert set(np.unique(v1)) <= {0, 1}


def test_probe_i2_against_dense(tables):
    # L = 8 with two probes is 12 qubits: small enough for the dense oracle
    rng = np.random.default_rng(5)
    for seed in range(8):
        cfg = ProbeConfig(CircuitConfig(8, 0.1, seed=int(rng.integers(1 << 30))), t0=8, t1=4)
        res = probe_trajectory(cfg, 2)
        L = 8
        gates, meas_u, coins = draw_circuit(stream(cfg.base.seed), L, 12)
        g = new_zero_state(L + 4, tables)
        evolve(g, L, True, 0, gates[:8], meas_u[:8], coins[:8], 0.1)
        for k, x in enumerate(cfg.sites(2)):
            entangle_reference(g, x, L + 2 * k, L + 2 * k + 1)
        evolve(g, L, True, 8, gates[8:], meas_u[8:], coins[8:], 0.1)
        psi = g.to_statevector()
        r1, r2 = D.entropy_bits(psi, 12, [8]), D.entropy_bits(psi, 12, [10])
        joint = D.entropy_bits(psi, 12, [8, 10])
        assert res.i2 == pytest.approx(r1 + r2 - joint, abs=1e-9)
        assert res.i2 <= 2 * min(res.s_r)


def test_probe_site_defaults_and_validation():
    base = CircuitConfig(16, 0.1)
    assert ProbeConfig(base).sites(1) == (8,)
    assert ProbeConfig(base).sites(2) == (4, 12)
    assert ProbeConfig(base, surface=True).sites(2) == (0, 15)
    with pytest.raises(ValueError):
        ProbeConfig(base, probe_sites=(3, 3)).sites(2)
    with pytest.raises(ValueError):
        ProbeConfig(base, probe_sites=(16,)).sites(1)
    with pytest.raises(ValueError):
        PurificationConfig(base, purity_threshold_bits=0.0)
