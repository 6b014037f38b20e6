"""Small-scale tour of the measurement-induced transition in Clifford circuits.

Runs a short I3 scan on modest sizes, collapses it, and compares the
half-chain entropy with its minimal-cut bound.  Takes about a minute.
"""
import numpy as np

from rclab.graph_state import new_zero_state
from rclab.mincut import hartley_min_cut
from rclab.monitored import draw_circuit, evolve, run_ensemble, steady_state
from rclab.rng import stream
from rclab.scaling import ScanPoint, collapse

sizes = (8, 16, 24, 32)
rates = np.round(np.arange(0.10, 0.2201, 0.02), 2)
points = []
for L in sizes:
    for p in rates:
        recs = run_ensemble(L, float(p), 60, master_seed=1, record_from=3 * L)
        m, e, _ = steady_state(recs, "i3")
        points.append(ScanPoint(L, float(p), m, max(e, 1e-6)))
        print(f"L={L:3d} p={p:.2f}  I3 = {m:7.3f} ± {e:.3f}")

fit = collapse(points)
print(f"\ncollapse: p_c = {fit.p_c:.3f} ± {fit.stderr[0]:.3f}, nu = {fit.nu:.2f} ± {fit.stderr[1]:.2f}")

# the zeroth Renyi entropy is bounded by the cheapest cut through unmeasured wires
L, T, p = 16, 64, 0.1
gates, meas_u, coins = draw_circuit(stream(5), L, T)
g = new_zero_state(L)
evolve(g, L, True, 0, gates, meas_u, coins, p)
print(f"S(L/2) = {g.entropy_bits(range(L // 2))} bits, min-cut bound = "
      f"{hartley_min_cut(L, T, meas_u < p, range(L // 2), 'periodic')}")
