"""Numerical tolerances used across the package.

All validity checks on density matrices share ``VALIDITY_TOL``; identities
between fidelity-type quantities are asserted at ``METRIC_TOL``.
"""

#: Tolerance for Hermiticity, unit trace, and the negative-eigenvalue clamp.
VALIDITY_TOL = 1e-12

#: Tolerance for identities between metrics (symmetry, agreement between equivalent formulas).
METRIC_TOL = 1e-10

#: Environment variable consulted for the default number of worker threads.
THREADS_ENV = "FID_THREADS"
