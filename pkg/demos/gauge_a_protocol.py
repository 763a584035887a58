"""Is a protocol's fidelity better than chance?

Suppose an experiment reports an average fidelity ``f`` between prepared and
target states.  Random states already overlap on average, so ``f`` means
more when it sits many standard deviations above the random-pair mean.  The
gauge coefficient ``alpha = (f - <F>) / std(F)`` measures exactly that.

Run with ``python demos/gauge_a_protocol.py``.
"""

from randfid import analytic
from randfid.cli import gauge

reported = 0.90
for N, K in ((2, 1), (2, 2), (4, 4), (8, 8)):
    g = gauge(N, K, reported)
    mean = g["mean_f"]["value"]
    print(f"N={N} K={K}  <F> = {mean:.4f}   alpha({reported}) = {g['alpha']:+.2f}")

# The optimal universal cloner reaches this fidelity:
for N in (2, 3):
    print(f"cloning fidelity N={N}: {analytic.cloning_fidelity(N):.4f}, "
          f"chance to beat it with a random pair: {analytic.cloning_exceed_prob(N):.4f}")
