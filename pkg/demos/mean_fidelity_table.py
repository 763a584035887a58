"""The symmetric mean fidelity as a function of dimension and ancilla size.

For states drawn from ``mu_{N,K}`` the mean fidelity has a closed form in
terms of small Gamma-function matrices.  This script prints the table for
``N = 2..6`` and ``K = 1..8`` and checks two rows against Monte Carlo.

Run with ``python demos/mean_fidelity_table.py``.
"""

from randfid import analytic
from randfid.curves import mean_table

Ns, Ks = range(2, 7), range(1, 9)
print("N\\K " + "".join(f"{K:>9d}" for K in Ks))
for N in Ns:
    print(f"{N:3d} " + "".join(f"{analytic.mean_fidelity_NK(N, K):9.5f}" for K in Ks))

# Row K = 1 is 1/N (pure states); larger K approaches 1 as the states
# concentrate near the maximally mixed state.  Spot-check with sampling.
print("\nMonte Carlo spot checks (20000 pairs each):")
for row in mean_table([3, 4], [2, 5], mc_samples=20_000, seed=11):
    z = (row["mc_mean"] - row["analytic"]) / row["mc_err"]
    print(f"N={row['N']} K={row['K']}  MC {row['mc_mean']:.5f} +/- {row['mc_err']:.5f}"
          f"   closed {row['analytic']:.5f}   z={z:+.2f}")

# Non-integer K is allowed for the analytic routes.  K = 3/2 on a qubit is
# the Bures measure.
print(f"\nBures qubit mean fidelity: {analytic.mean_fidelity_2K(1.5):.6f}")
