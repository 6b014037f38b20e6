"""Purification of a maximally mixed start and the single-reference probe."""
import numpy as np

from rclab.monitored import CircuitConfig
from rclab.purification import ProbeConfig, order_parameter_probe, purification_ensemble

for p in (0.08, 0.25):
    for L in (16, 32):
        res = purification_ensemble(L, p, 40, master_seed=3)
        tp = np.array([r.t_p for r in res])
        print(f"p={p:.2f} L={L:3d}  median t_p = {np.median(tp)}, S_ref(4L)/L = "
              f"{np.mean([r.s_ref[-1] for r in res]) / L:.2f}")

for p in (0.05, 0.10, 0.14):
    m, e, _ = order_parameter_probe(ProbeConfig(CircuitConfig(64, p)), 200)
    print(f"reference entropy at p={p:.2f}: {m:.3f} ± {e:.3f} bits")
