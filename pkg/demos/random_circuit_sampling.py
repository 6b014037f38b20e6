"""Porter-Thomas statistics and cross-entropy of a 12-qubit grid circuit."""
import math

import numpy as np

from rclab.dense.entropy import participation_entropy
from rclab.dense.grid import random_grid_circuit, run_grid_circuit
from rclab.dense.sampling import porter_thomas_test, sample_counts, xeb

rng = np.random.Generator(np.random.Philox(0))
D = 2**12
states = [run_grid_circuit(random_grid_circuit(4, 3, 20, rng)) for _ in range(20)]
(_, _), ks = porter_thomas_test(states)
print(f"KS distance to Porter-Thomas: {ks:.4f}")
print(f"participation entropy {np.mean([participation_entropy(s) for s in states]):.3f} "
      f"vs ln D - 1 + gamma = {math.log(D) - 1 + np.euler_gamma:.3f}")
p = np.abs(states[0].amplitudes) ** 2
idx = np.repeat(*zip(*[(int(b, 2), c) for b, c in sample_counts(states[0], 20000, rng)]))
print(f"XEB of ideal samples {xeb(idx, p):.3f}, of uniform samples {xeb(rng.integers(0, D, 20000), p):.3f}")
