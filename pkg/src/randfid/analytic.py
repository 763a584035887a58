"""Closed-form and series evaluation of fidelity means, moments and densities.

Gamma functions are handled in log space (``scipy.special.gammaln`` plus
``gammasgn`` for the sign) so that ratios such as ``Gamma(KN)/Gamma(KN+1/2)``
stay finite for large ``K N``.  Where a formula has to be continued through a
pole of the Gamma function (induced measures with ``K < N``), the value is
obtained in :mod:`mpmath` as the symmetric limit ``K +/- eps`` and tagged
``"continued"``.

Most functions return plain floats.  :func:`estimate_mean` wraps them in an
:class:`Estimate` that also records an error estimate and a provenance tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import special

from .errors import (
    DegenerateVariance,
    DomainError,
    IllConditioned,
    TruncationUnstable,
    UnsupportedK,
)

__all__ = [
    "Estimate",
    "MomentTable",
    "XMatrix",
    "mean_fidelity_fs",
    "pdf_pure_pure",
    "pdf_pure_induced",
    "pdf_pure_hs",
    "asymptotic_trace_moment",
    "radial_pdf_2K",
    "mean_fidelity_2K",
    "pdf_fidelity_2K_closed",
    "pdf_fidelity_2K_asymptotic",
    "normalization_2K",
    "g_constant",
    "x_matrix",
    "mean_root_fidelity_NK",
    "mean_fidelity_NK",
    "mean_root_fidelity_2K_explicit",
    "mean_root_fidelity_3K_explicit",
    "mean_fidelity_3K_explicit",
    "mean_root_fidelity_N2_explicit",
    "mean_fidelity_N2_explicit",
    "moment_root_fidelity_series",
    "mean_purity",
    "cloning_fidelity",
    "cloning_exceed_prob",
    "gauge_alpha",
    "estimate_mean",
]


@dataclass(frozen=True)
class Estimate:
    """A number together with its error estimate and provenance."""

    value: float
    error: float = 0.0
    provenance: str = "closed-form"


@dataclass
class MomentTable:
    """Moments ``<(sqrt F)^m>`` for ``m = 0..m_max``.

    Attributes
    ----------
    N, K : int or float
    moments : dict
        Maps ``m`` to the moment value; ``moments[0] == 1``.
    errors : dict
        Maps ``m`` to an error estimate.
    method : str
        One of ``closed-form``, ``series-Z``, ``series-ZK``, ``monte-carlo``.
    """

    N: float
    K: float
    moments: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    method: str = "series-Z"

    def __getitem__(self, m):
        return self.moments[m]

    @property
    def m_max(self) -> int:
        return max(self.moments)


def _lgamma_ratio(num, den) -> float:
    """``log |prod Gamma(num) / prod Gamma(den)|`` and its sign."""
    num = np.atleast_1d(np.asarray(num, dtype=float))
    den = np.atleast_1d(np.asarray(den, dtype=float))
    lg = np.sum(special.gammaln(num)) - np.sum(special.gammaln(den))
    sg = np.prod(special.gammasgn(num)) * np.prod(special.gammasgn(den))
    return float(lg), float(sg)


def _gratio(num, den) -> float:
    lg, sg = _lgamma_ratio(num, den)
    return sg * math.exp(lg)


# ------------------------------------------------------------------ pure states


def mean_fidelity_fs(N: int) -> float:
    """Mean fidelity between two random pure states, ``1/N``."""
    if N < 1:
        raise DomainError("N must be positive")
    return 1.0 / N


def pdf_pure_pure(N: int, F):
    """Density of ``F = |<psi|phi>|^2`` for random pure states, ``(N-1)(1-F)^(N-2)``."""
    F = np.asarray(F, dtype=float)
    if N < 2:
        raise DomainError("N must be at least 2")
    if np.any((F < 0) | (F > 1)):
        raise DomainError("F must lie in [0, 1]")
    out = (N - 1) * (1.0 - F) ** (N - 2)
    return float(out) if out.ndim == 0 else out


def pdf_pure_induced(N: int, K: float, F, real: bool = False):
    """Fidelity density between a random pure state and an induced mixed state.

    Complex case: ``Beta(K, K(N-1))``; real case: ``Beta(K/2, K(N-1)/2)``.
    ``K`` may be any positive real.

    Examples
    --------
    >>> round(pdf_pure_induced(2, 2, 0.5), 12)
    1.5
    """
    F = np.asarray(F, dtype=float)
    if N < 2 or K <= 0:
        raise DomainError("need N >= 2 and K > 0")
    if np.any((F < 0) | (F > 1)):
        raise DomainError("F must lie in [0, 1]")
    a, b = (K / 2, K * (N - 1) / 2) if real else (K, K * (N - 1))
    out = np.exp(
        special.xlogy(a - 1, F)
        + special.xlog1py(b - 1, -F)
        - special.betaln(a, b)
    )
    return float(out) if out.ndim == 0 else out


def pdf_pure_hs(N: int, F, real: bool = False):
    """:func:`pdf_pure_induced` with ``K = N``."""
    return pdf_pure_induced(N, N, F, real)


def asymptotic_trace_moment(q: float, measure: str = "hs") -> float:
    """Leading coefficient ``c`` in ``<Tr rho^q> ~ c N^(1-q)``.

    Parameters
    ----------
    q : float
    measure : {'hs', 'bures'}
    """
    if measure == "hs":
        return _gratio([1 + 2 * q], [1 + q, 2 + q])
    if measure == "bures":
        return 2.0**q * _gratio([(3 * q + 1) / 2], [(1 + q) / 2, 2 + q])
    raise DomainError(f"unknown measure {measure!r}")


# ------------------------------------------------------------------ one qubit


def radial_pdf_2K(r, K: float):
    """Bloch radius density of ``mu_{2,K}`` (continued in ``K > 1``).

    ``P_K(r) = 2^(K+3/2) Gamma(K+1/2) / (sqrt(pi) Gamma(K-1)) (1/2 - r^2)^(K-2) r^2``
    on ``[0, sqrt(2)/2]``; ``K = 2`` gives the uniform-ball law ``6 sqrt(2) r^2``.
    """
    if K <= 1:
        raise DomainError("K must exceed 1")
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > np.sqrt(0.5) + 1e-15)):
        raise DomainError("r must lie in [0, sqrt(2)/2]")
    lc = (K + 1.5) * math.log(2) + special.gammaln(K + 0.5) - 0.5 * math.log(math.pi) - special.gammaln(K - 1)
    with np.errstate(divide="ignore"):
        out = np.exp(lc + special.xlogy(K - 2, np.clip(0.5 - r * r, 0, None))) * r * r
    return float(out) if out.ndim == 0 else out


def mean_fidelity_2K(K: float) -> float:
    """Symmetric mean fidelity for qubits under ``mu_{2,K}``, real ``K >= 3/2``.

    Examples
    --------
    >>> abs(mean_fidelity_2K(2) - (0.5 + 9 * math.pi**2 / 512)) < 1e-14
    True
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    if K == 1:
        return 0.5
    t = _gratio([K + 0.5, K - 0.5], [K + 1, K - 1])
    return 0.5 + 0.5 * t * t


def normalization_2K(K: float) -> float:
    """The constant ``C(K) = 2(K-1) (Gamma(2K)/Gamma(K)^2)^2``."""
    return 2 * (K - 1) * math.exp(2 * (special.gammaln(2 * K) - 2 * special.gammaln(K)))


@lru_cache(maxsize=None)
def _derivative_terms(order: int):
    """Terms of ``(d/dF)^order [A / sqrt(F(1-F))]`` with ``A = arccos(1-2F)``.

    Returns a tuple of ``(e, a, b, c)`` meaning ``c * A^e F^a (1-F)^b`` with
    rational ``a, b, c``.  Uses ``dA/dF = F^(-1/2) (1-F)^(-1/2)``.
    """
    half = Fraction(1, 2)
    terms = {(1, -half, -half): Fraction(1)}
    for _ in range(order):
        new = {}

        def add(key, val):
            if val:
                new[key] = new.get(key, 0) + val

        for (e, a, b), c in terms.items():
            if e:
                add((e - 1, a - half, b - half), c * e)
            add((e, a - 1, b), c * a)
            add((e, a, b - 1), -c * b)
        terms = {k: v for k, v in new.items() if v}
    return tuple((e, a, b, c) for (e, a, b), c in sorted(terms.items()))


def _closed_2K_scalar(F, K, order, dps):
    with mp.workdps(dps):
        Fm = mp.mpf(F)
        G = 1 - Fm
        A = mp.acos(1 - 2 * Fm)
        s = mp.mpf(0)
        p = 2 * (K - 1)
        for e, a, b, c in _derivative_terms(order):
            fa = mp.mpf(a.numerator) / a.denominator + p
            fb = mp.mpf(b.numerator) / b.denominator + p
            s += mp.mpf(c.numerator) / c.denominator * A**e * Fm**fa * G**fb
        logc = mp.log(2 * (mp.mpf(K) - 1)) + 2 * (mp.loggamma(2 * mp.mpf(K)) - 2 * mp.loggamma(mp.mpf(K)))
        return float(mp.exp(logc - p * mp.log(4) - mp.loggamma(order + 1)) * s)


def pdf_fidelity_2K_closed(F, K: float, dps: int = 40):
    """Symmetric fidelity density for qubits, closed form for half-integer ``K``.

    The ``2K-3`` derivatives are generated symbolically and the resulting
    sum is evaluated in extended precision, which absorbs the cancellation
    near ``F = 0`` and ``F = 1`` at large ``K``.

    Parameters
    ----------
    F : float or array_like
        Points in ``(0, 1)``.
    K : float
        ``2(K-1)`` must be a non-negative integer.
    dps : int, optional
        Working decimal digits.

    Raises
    ------
    UnsupportedK
        If ``2(K-1)`` is not a non-negative integer.
    """
    two = 2 * (K - 1)
    if two < 0 or abs(two - round(two)) > 1e-12:
        raise UnsupportedK(f"K = {K} is not a half-integer >= 1")
    Fa = np.asarray(F, dtype=float)
    if np.any((Fa < 0) | (Fa > 1)):
        raise DomainError("F must lie in [0, 1]")
    if round(two) == 0:
        out = np.ones_like(Fa)
    else:
        order = int(round(2 * K - 3))
        Kx = Fraction(int(round(2 * K)), 2)
        Kx = mp.mpf(Kx.numerator) / Kx.denominator
        flat = [
            0.0 if f in (0.0, 1.0) else _closed_2K_scalar(f, Kx, order, dps)
            for f in Fa.ravel()
        ]
        out = np.asarray(flat).reshape(Fa.shape)
    return float(out) if out.ndim == 0 else out


def pdf_fidelity_2K_asymptotic(F, K: float):
    """Large-``K`` approximation ``Gamma(2K+1/2)/(Gamma(3/2)Gamma(2K-1)) F^(2K-2) sqrt(1-F)``."""
    F = np.asarray(F, dtype=float)
    lc = special.gammaln(2 * K + 0.5) - special.gammaln(1.5) - special.gammaln(2 * K - 1)
    out = np.exp(lc + special.xlogy(2 * (K - 1), F)) * np.sqrt(np.clip(1 - F, 0, None))
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------------ X matrices


def g_constant(m: float, N: float, K: float) -> float:
    """``G(m) = (Gamma(KN) / Gamma(KN + m/2))^2``."""
    return math.exp(2 * (special.gammaln(K * N) - special.gammaln(K * N + m / 2)))


@dataclass(frozen=True)
class XMatrix:
    """``(X_n)_{kl} = Gamma(n+k+l-1) Gamma(n+l)`` in log-magnitude/sign form."""

    N: int
    n: float
    log_abs: np.ndarray
    sign: np.ndarray

    def scaled(self, row_shift, col_shift) -> np.ndarray:
        r = np.broadcast_to(np.asarray(row_shift, dtype=float), (self.N,))
        c = np.broadcast_to(np.asarray(col_shift, dtype=float), (self.N,))
        return self.sign * np.exp(self.log_abs - r[:, None] - c[None, :])


def _x_args(N, n):
    k = np.arange(1, N + 1)[:, None]
    l = np.arange(1, N + 1)[None, :]
    return n + k + l - 1, np.broadcast_to(n + l, (N, N)).astype(float)


def x_matrix(N: int, n: float) -> XMatrix:
    """Build ``X_n``; entries must avoid the poles of the Gamma function."""
    a, b = _x_args(N, n)
    if _hits_pole(a) or _hits_pole(b):
        raise DomainError(f"X_{n} has a Gamma pole")
    la = special.gammaln(a) + special.gammaln(b)
    sg = special.gammasgn(a) * special.gammasgn(b)
    return XMatrix(N, float(n), la, sg)


def _hits_pole(x) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.any((x <= 0) & (np.abs(x - np.round(x)) < 1e-12)))


def _x_route_double(N, K, cond_limit=1e13):
    n = K - N
    xs = [x_matrix(N, n + s) for s in (0.0, 0.5, 1.0)]
    # Row and column shifts taken from X_n itself and applied to all three
    # matrices leave the traces Tr(X_n^-1 Y) unchanged.
    rs = xs[0].log_abs.max(axis=1)
    cs = (xs[0].log_abs - rs[:, None]).max(axis=0)
    x0, xh, x1 = (x.scaled(rs, cs) for x in xs)
    cond = np.linalg.cond(x0)
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditioned(f"X_n has condition number {cond:.3g}", cond)
    a = np.linalg.solve(x0, xh)
    b = np.linalg.solve(x0, x1)
    return float(np.trace(a)), float(np.trace(b)), float(np.trace(a @ a)), cond


def _x_route_mp(N, K, dps=60, eps_exp=25):
    def traces(Kv):
        n = Kv - N
        X = {}
        for s in (0, mp.mpf(1) / 2, 1):
            X[s] = mp.matrix(
                [[mp.gamma(n + s + k + l - 1) * mp.gamma(n + s + l) for l in range(1, N + 1)] for k in range(1, N + 1)]
            )
        inv = mp.inverse(X[0])
        a = inv * X[mp.mpf(1) / 2]
        b = inv * X[1]
        aa = a * a
        return (
            sum(a[i, i] for i in range(N)),
            sum(b[i, i] for i in range(N)),
            sum(aa[i, i] for i in range(N)),
        )

    with mp.workdps(dps):
        Km = mp.mpf(K)
        eps = mp.mpf(10) ** (-eps_exp)
        lo, hi = traces(Km - eps), traces(Km + eps)
        vals = [(u + v) / 2 for u, v in zip(lo, hi)]
        spread = max(abs(u - v) for u, v in zip(lo, hi))
        return tuple(float(v) for v in vals) + (float(spread),)


def _needs_continuation(N, K) -> bool:
    n = K - N
    for s in (0.0, 0.5, 1.0):
        a, b = _x_args(N, n + s)
        if _hits_pole(a) or _hits_pole(b):
            return True
    return False


def _x_traces(N, K):
    if N < 1 or K <= 0:
        raise DomainError("need N >= 1 and K > 0")
    if _needs_continuation(N, K):
        t1, t2, t3, spread = _x_route_mp(N, K)
        return t1, t2, t3, "continued", spread
    try:
        t1, t2, t3, cond = _x_route_double(N, K)
    except IllConditioned:
        t1, t2, t3, spread = _x_route_mp_plain(N, K)
        return t1, t2, t3, "continued" if K < N else "closed-form", spread
    err = cond * np.finfo(float).eps
    return t1, t2, t3, "continued" if K < N else "closed-form", err


def _x_route_mp_plain(N, K, dps=60):
    with mp.workdps(dps):
        n = mp.mpf(K) - N
        X = {}
        for s in (0, mp.mpf(1) / 2, 1):
            X[s] = mp.matrix(
                [[mp.gamma(n + s + k + l - 1) * mp.gamma(n + s + l) for l in range(1, N + 1)] for k in range(1, N + 1)]
            )
        inv = mp.inverse(X[0])
        a = inv * X[mp.mpf(1) / 2]
        b = inv * X[1]
        aa = a * a
        tr = lambda m: float(sum(m[i, i] for i in range(N)))
        return tr(a), tr(b), tr(aa), 0.0


def mean_root_fidelity_NK(N: int, K: float) -> float:
    """Symmetric mean root fidelity ``<sqrt F>_{N,K}`` from the X-matrix traces.

    Examples
    --------
    >>> round(mean_root_fidelity_NK(2, 2), 10) == round(2**5 * 31 / (25 * 49), 10)
    True
    """
    t1, _, _, _, _ = _x_traces(N, K)
    return g_constant(1, N, K) * t1


def mean_fidelity_NK(N: int, K: float) -> float:
    """Symmetric mean fidelity ``<F>_{N,K}`` from the X-matrix traces.

    ``K`` may be real.  Values below ``K = N`` are analytic continuations;
    where a Gamma pole is met they are computed as symmetric limits in
    extended precision.
    """
    t1, t2, t3, _, _ = _x_traces(N, K)
    return g_constant(2, N, K) * (t2 + t1 * t1 - t3)


def _nk_estimate(N, K, which):
    t1, t2, t3, prov, err = _x_traces(N, K)
    if which == "sqrtf":
        v = g_constant(1, N, K) * t1
    else:
        v = g_constant(2, N, K) * (t2 + t1 * t1 - t3)
    return Estimate(v, max(abs(v) * err, 4 * np.finfo(float).eps), prov)


# ------------------------------------------------------------------ explicit forms


def _sq(num, den):
    return _gratio(num, den) ** 2


def mean_root_fidelity_2K_explicit(K: float) -> float:
    """Explicit qubit formula for ``<sqrt F>_{2,K}``."""
    return _sq([2 * K], [2 * K + 0.5]) * (
        1.5 * _sq([K + 0.5], [K]) + 0.5 * _sq([K - 0.5], [K - 1])
    )


def mean_root_fidelity_3K_explicit(K: float) -> float:
    """Explicit qutrit formula for ``<sqrt F>_{3,K}`` (``K > 2``)."""
    return _sq([3 * K], [3 * K + 0.5]) * (
        0.375 * _sq([K - 1.5], [K - 2])
        + 0.75 * _sq([K - 0.5], [K - 1])
        + 1.875 * _sq([K + 0.5], [K])
    )


def mean_fidelity_3K_explicit(K: float) -> float:
    """Explicit qutrit formula for ``<F>_{3,K}`` (``K > 2``)."""
    a = _sq([K - 0.5], [K - 1])
    b = _sq([K + 0.5], [K])
    c = _sq([K - 1.5], [K - 2])
    d = _sq([K + 0.5, K - 1.5], [K, K - 2])
    return 1 / 3 + (a * (5 / 12 * b + 1 / 12 * c) + d / 6) / K**2


def mean_root_fidelity_N2_explicit(N: float) -> float:
    """``<sqrt F>_{N,2}`` for rank-two induced states, any ``N``."""
    return (
        math.sqrt(math.pi) / 16 * (22 * N - 13) * _sq([2 * N], [2 * N + 0.5]) * _gratio([N - 0.5], [N])
    )


def mean_fidelity_N2_explicit(N: float) -> float:
    """``<F>_{N,2}`` for rank-two induced states, any ``N``."""
    return (1 + 3 * math.pi / 16 * _gratio([N - 0.5, N + 0.5], [N - 1, N + 1])) / N


# ------------------------------------------------------------------ series route


def _series_mul(a, b, M):
    out = [mp.mpf(0)] * (M + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(M + 1 - i):
            out[i + j] += ai * b[j]
    return out


def _series_inv(a, M):
    inv = [mp.mpf(0)] * (M + 1)
    inv[0] = 1 / a[0]
    for k in range(1, M + 1):
        s = mp.mpf(0)
        for j in range(1, k + 1):
            s += a[j] * inv[k - j]
        inv[k] = -s * inv[0]
    return inv


def _series_det(mat, M):
    """Determinant of a matrix of truncated power series (Gaussian elimination)."""
    n = len(mat)
    a = [[list(e) for e in row] for row in mat]
    det = [mp.mpf(1)] + [mp.mpf(0)] * M
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(a[r][c][0]))
        if a[p][c][0] == 0:
            raise TruncationUnstable("singular constant term in series determinant")
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = [-x for x in det]
        det = _series_mul(det, a[c][c], M)
        inv = _series_inv(a[c][c], M)
        for r in range(c + 1, n):
            f = _series_mul(a[r][c], inv, M)
            for j in range(c, n):
                prod = _series_mul(f, a[c][j], M)
                a[r][j] = [x - y for x, y in zip(a[r][j], prod)]
    return det


def _z_entries(N, K, M):
    n = mp.mpf(K) - N
    mat = []
    for k in range(1, N + 1):
        row = []
        for l in range(1, N + 1):
            row.append(
                [
                    mp.gamma(mp.mpf(m) / 2 + k + l + n - 1) * mp.gamma(mp.mpf(m) / 2 + l + n) / mp.factorial(m)
                    for m in range(M + 1)
                ]
            )
        mat.append(row)
    return mat


def _zk_entries(N, K, M):
    Nm = mp.mpf(N)
    mat = []
    for k in range(1, K + 1):
        row = []
        for l in range(1, K + 1):
            row.append(
                [
                    mp.gamma(mp.mpf(m) / 2 + k + Nm - K) ** 2
                    * mp.gamma(mp.mpf(m) / 2 + k + l - 1)
                    * mp.rgamma(mp.mpf(m) / 2 + k + l + Nm - 2 * K)
                    / mp.factorial(m)
                    for m in range(M + 1)
                ]
            )
        mat.append(row)
    return mat


def _series_ratios(N, K, M, route):
    mat = _z_entries(N, K, M) if route == "series-Z" else _zk_entries(N, int(K), M)
    det = _series_det(mat, M)
    return [det[m] / det[0] for m in range(M + 1)]


def _series_moments(N, K, M, route, dps):
    with mp.workdps(dps):
        if route == "series-ZK" and N < 2 * K:
            # The K x K generating function is singular at lambda = 0 when
            # N < 2K; its coefficient ratios are continued in N as the
            # symmetric limit N +/- eps.
            eps = mp.mpf(10) ** (-(dps // 3))
            lo = _series_ratios(mp.mpf(N) - eps, K, M, route)
            hi = _series_ratios(mp.mpf(N) + eps, K, M, route)
            ratios = [(a + b) / 2 for a, b in zip(lo, hi)]
        else:
            ratios = _series_ratios(N, K, M, route)
        out = {}
        for m in range(M + 1):
            lg = 2 * (mp.loggamma(mp.mpf(K) * N) - mp.loggamma(mp.mpf(K) * N + mp.mpf(m) / 2))
            out[m] = mp.exp(lg) * mp.factorial(m) * ratios[m]
        return out


def moment_root_fidelity_series(N: int, K: float, m_max: int = 4, dps: int = 40) -> MomentTable:
    """Moments ``<(sqrt F)^m>_{N,K}``, ``m <= m_max``, from generating functions.

    Each determinant entry is a truncated power series in ``mu = -lambda``
    whose coefficients are products of Gamma functions.  The determinant is
    expanded in series arithmetic at ``dps`` digits; the run is repeated at
    ``dps + 20`` digits and the difference is reported as the error.

    For ``K >= N`` the ``N x N`` generating function is used
    (``method='series-Z'``).  For integer ``K < N`` the ``K x K`` one is used
    (``method='series-ZK'``).
    """
    if m_max > 8 or m_max < 0:
        raise DomainError("m_max must lie in 0..8")
    if K >= N:
        route = "series-Z"
    elif float(K).is_integer() and K >= 1:
        route = "series-ZK"
    else:
        raise DomainError("non-integer K < N has no series route")
    lo = _series_moments(N, K, m_max, route, dps)
    hi = _series_moments(N, K, m_max, route, dps + 20)
    table = MomentTable(N, K, method=route)
    for m in range(m_max + 1):
        v = float(hi[m])
        e = float(abs(hi[m] - lo[m]))
        if e > 1e-12 * max(1.0, abs(v)):
            raise TruncationUnstable(f"moment {m} lost too many digits ({e:.3g})")
        table.moments[m] = v
        table.errors[m] = e + 4 * np.finfo(float).eps * abs(v)
    return table


# ------------------------------------------------------------------ misc


def mean_purity(N: int, K: float) -> float:
    """Mean purity ``<Tr rho^2> = (N+K)/(NK+1)`` under ``mu_{N,K}``."""
    return (N + K) / (N * K + 1)


def cloning_fidelity(N: int) -> float:
    """Universal cloning fidelity ``(N+3)/(2N+2)``."""
    return (N + 3) / (2 * N + 2)


def cloning_exceed_prob(N: int) -> float:
    """Probability that two random pure states beat the cloning fidelity."""
    if N < 2:
        raise DomainError("N must be at least 2")
    return 2.0 ** (1 - N) * ((N - 1) / (N + 1)) ** (N - 1)


def gauge_alpha(f_tilde: float, mean_f: float, mean_f2: float) -> float:
    """Distance of ``f_tilde`` from the mean in units of the standard deviation."""
    var = mean_f2 - mean_f**2
    if not var > 1e-15:
        raise DegenerateVariance(f"variance {var!r} is not positive")
    return (f_tilde - mean_f) / math.sqrt(var)


def estimate_mean(N: int, K: float, statistic: str = "f", method: str = "closed") -> Estimate:
    """Symmetric mean of ``F`` (``statistic='f'``) or ``sqrt F`` (``'sqrtf'``).

    Parameters
    ----------
    method : {'closed', 'series'}
        ``closed`` uses the X-matrix traces, ``series`` the generating
        function expansion.
    """
    if statistic not in ("f", "sqrtf"):
        raise DomainError(f"unknown statistic {statistic!r}")
    if method == "closed":
        return _nk_estimate(N, K, statistic)
    if method == "series":
        m = 1 if statistic == "sqrtf" else 2
        t = moment_root_fidelity_series(N, K, m)
        prov = "series" if K >= N else "continued"
        return Estimate(t[m], t.errors[m], prov)
    raise DomainError(f"unknown method {method!r}")
