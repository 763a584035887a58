"""The full fidelity distribution for two random qutrits.

For ``N >= 3`` the symmetric density ``P_{N,K}(F)`` is only available as an
integral of a determinant generating function.  ``WPipeline`` evaluates it;
here we check its normalization and moments and overlay a Monte Carlo
histogram.

Run with ``python demos/symmetric_density_n3.py`` (about half a minute).
"""

import numpy as np

from randfid import analytic
from randfid.curves import dist_curve, law, midpoint_grid
from randfid.distnum import WPipeline

N, K = 3, 3
pipe = WPipeline(N, K)
print(f"normalization before rescaling: {pipe.normalization:.12f}")
for m, name, exact in ((1, "<sqrt F>", analytic.mean_root_fidelity_NK(N, K)),
                       (2, "<F>     ", analytic.mean_fidelity_NK(N, K))):
    print(f"{name}  pipeline {pipe.moment(m):.10f}   closed form {exact:.10f}")

curve = dist_curve(law("sym-nk", N, K), midpoint_grid(20), mc_samples=40_000, seed=5, bins=20)
print("\n   F      pdf     histogram")
for f, p, h in zip(curve["F"], curve["pdf"], curve["hist"]):
    print(f"{f:5.3f}  {p:8.4f}  {h:8.4f}")
D, p = curve["ks"]
print(f"\nKolmogorov-Smirnov: D = {D:.4f}, p = {p:.3f}")
print(f"most likely fidelity: F = {curve['F'][int(np.argmax(curve['pdf']))]:.3f}")
