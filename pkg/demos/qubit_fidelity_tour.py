"""How similar are two random qubits?

We draw pairs of qubit density matrices from the induced measures
``mu_{2,K}`` (``K = 1`` is a pure state, ``K = 2`` is Hilbert-Schmidt),
compare the Monte Carlo mean fidelity with the closed form and look at the
shape of the distribution.

Run with ``python demos/qubit_fidelity_tour.py``.
"""

import numpy as np

from randfid import analytic
from randfid.montecarlo import ExperimentSpec, run_experiment
from randfid.samplers import MeasureSpec

# Two random pure qubits: the fidelity is uniform on [0, 1], so its mean is 1/2.
fs = MeasureSpec.fubini_study(2)
res = run_experiment(ExperimentSpec(fs, fs, n_samples=20_000, seed=1))
print(f"pure-pure mean  MC {res.mean:.4f} +/- {res.stderr:.4f}   exact {analytic.mean_fidelity_fs(2):.4f}")

# Mixing the states pushes the fidelity up: mixed states overlap more.
for K in (2, 3, 4):
    m = MeasureSpec.induced(2, K)
    res = run_experiment(ExperimentSpec(m, m, n_samples=20_000, seed=K))
    exact = analytic.mean_fidelity_NK(2, K)
    print(f"K={K}  mean  MC {res.mean:.4f} +/- {res.stderr:.4f}   closed form {exact:.6f}")

# The symmetric Hilbert-Schmidt qubit law has a closed form.  Compare it with
# a histogram of the same run.
m = MeasureSpec.hilbert_schmidt(2)
res = run_experiment(ExperimentSpec(m, m, n_samples=50_000, seed=7, histogram_bins=10))
F = res.histogram.x
exact = analytic.pdf_fidelity_2K_closed(F, 2)
print("\n   F    histogram   closed form")
for f, h, e in zip(F, res.histogram.pdf, exact):
    print(f"{f:5.2f}   {h:8.3f}   {e:8.3f}")
# A histogram bar is the average of the density over its bin, which is not
# the midpoint value where the density bends sharply (the last bin).  Compare
# bin averages instead.
edges = res.histogram.meta["edges"]
fine = np.linspace(0, 1, 10 * 400 + 1)[1:-1]
avg = [analytic.pdf_fidelity_2K_closed(fine[(fine > a) & (fine < b)], 2).mean() for a, b in zip(edges, edges[1:])]
print(f"\nlargest deviation from bin averages: {np.max(np.abs(res.histogram.pdf - avg)):.3f}")
