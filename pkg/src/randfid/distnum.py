"""Fidelity densities that are only available as integrals.

Three families are covered:

* a random pure state against a Bures-distributed mixed state
  (:func:`pdf_pure_bures`);
* symmetric qubit densities for real ``K`` (:func:`pdf_fidelity_2K_integral`);
* the symmetric density ``P_{N,K}(F)`` for ``K >= N`` built from the
  generating function ``Z(lambda)`` (:class:`WPipeline`).

The last one deserves a note.  ``Z`` is a determinant of integrals that is
analytic off the cut ``lambda <= -2``.  The density of ``phi = sqrt(F)`` is

    W(phi) = -Im( int_P Z(lam) kappa(-lam * phi) dlam ) / (pi Z(0))

where ``P`` is the upper half of the circle through ``-2/phi`` and ``0`` and
``kappa`` is an elementary kernel whose real part vanishes for real
arguments ``>= 2`` (see :func:`kappa`).  On the cut this is a finite-part integral of
``Im Z(-x - i0)`` against ``kappa``; moving it onto ``P`` removes the
singularity at ``x = 2`` and makes plain Gauss rules converge geometrically.
The printed kernel :func:`b_kernel` and the boundary values
:func:`im_z_minus` are exposed as building blocks and cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

from .errors import DomainError, NormalizationDrift, QuadratureFailure

__all__ = [
    "QuadConfig",
    "DistributionCurve",
    "pdf_pure_bures",
    "pdf_fidelity_2K_integral",
    "h_k",
    "z_of_x",
    "z_of_x_y_form",
    "a_matrices",
    "im_z_minus",
    "z_complex",
    "kappa",
    "b_kernel",
    "WPipeline",
    "pdf_fidelity_NK",
]


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances for adaptive quadrature.

    ``endpoint_substitution`` selects how integrable endpoint singularities
    are treated by the routines that support a choice: ``'sqrt-singularity'``
    (algebraic weights), ``'log-singularity'`` or ``'none'``.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    endpoint_substitution: str = "sqrt-singularity"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.endpoint_substitution not in ("none", "sqrt-singularity", "log-singularity"):
            raise DomainError("unknown endpoint substitution")


@dataclass
class DistributionCurve:
    """Sampled density with normalization metadata.

    Attributes
    ----------
    x : ndarray
        Abscissae (fidelity values).
    pdf : ndarray
        Density values at ``x``.
    pdf_err : ndarray or None
        Pointwise error estimate.
    normalization : float
        Factor the raw curve was divided by (1 if none was applied).
    provenance : str
    meta : dict
    """

    x: np.ndarray
    pdf: np.ndarray
    pdf_err: np.ndarray | None = None
    normalization: float = 1.0
    provenance: str = "quadrature"
    meta: dict = field(default_factory=dict)


def _quad(f, a, b, cfg, **kw):
    val, err, *rest = integrate.quad(
        f, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions, full_output=1, **kw
    )
    # A fourth element is only present when QUADPACK reports a problem.
    if len(rest) >= 2 and err > max(100 * cfg.abs_tol, 1e-6 * abs(val)):
        raise QuadratureFailure(str(rest[1]).strip().splitlines()[0])
    return val, err


def _check_F(F):
    F = np.asarray(F, dtype=float)
    if np.any((F <= 0) | (F >= 1)):
        raise DomainError("F must lie strictly inside (0, 1)")
    return F


# ------------------------------------------------------------------ pure vs Bures


def pdf_pure_bures(N: int, F, cfg: QuadConfig = QuadConfig(), method: str = "hypergeometric"):
    """Fidelity density between a random pure state and a Bures mixed state.

    For ``N >= 3`` the defining integral over ``x in [F, 1]`` is mapped to
    ``s in [0, 1]`` with ``x = F + (1-F) s``, giving

        int_0^1 s^a (1-s)^b (F + (1-F) s)^(-g) ds.

    ``method='hypergeometric'`` evaluates this as a Gauss hypergeometric
    function with :func:`mpmath.hyp2f1`, which stays accurate when the mass
    concentrates in a layer of width ``F`` near ``s = 0``.
    ``method='quadrature'`` uses QUADPACK's algebraic-weight rule instead
    (or a plain rule when ``cfg.endpoint_substitution == 'none'``).

    For ``N = 2`` the integral diverges while the prefactor vanishes; the
    limit is ``(8/pi) sqrt(F(1-F))``.
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    if method not in ("hypergeometric", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    Fa = _check_F(F)
    if N == 2:
        out = 8 / np.pi * np.sqrt(Fa * (1 - Fa))
        return float(out) if out.ndim == 0 else out
    h = N * N / 2
    alpha, beta, gam = h - N - 1, N - 1.5, h - N + 0.5
    logc = (
        special.gammaln(h)
        + special.gammaln(2 * N - 1)
        - special.gammaln(N)
        - 2 * special.gammaln(N - 0.5)
        - special.gammaln(h - N)
    )
    vals = []
    for f in Fa.ravel():
        if method == "hypergeometric":
            integral = float(
                mp.beta(alpha + 1, beta + 1) * mp.hyp2f1(gam, alpha + 1, alpha + beta + 2, -(1 - f) / f)
            ) * f ** (-gam)
        elif cfg.endpoint_substitution == "none":
            g = lambda s: s**alpha * (1 - s) ** beta * (f + (1 - f) * s) ** (-gam)
            integral, _ = _quad(g, 0.0, 1.0, cfg)
        else:
            g = lambda s: (f + (1 - f) * s) ** (-gam)
            integral, _ = _quad(g, 0.0, 1.0, cfg, weight="alg", wvar=(alpha, beta))
        vals.append(math.exp(logc + (N - 1) * math.log(f) + (h - 1.5) * math.log1p(-f)) * integral)
    out = np.asarray(vals).reshape(Fa.shape)
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------------ qubits, real K


def pdf_fidelity_2K_integral(F, K: float, cfg: QuadConfig = QuadConfig()):
    """Symmetric qubit fidelity density under ``mu_{2,K}`` for real ``K >= 1``.

    With ``x = exp(-u)`` the integral becomes
    ``int_0^inf (2 cosh u + 2 - 4F)^(-2(K-1)) du``, evaluated in log form to
    avoid overflow.  ``K = 1`` returns the constant 1.
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    Fa = _check_F(F)
    if K == 1:
        out = np.ones_like(Fa)
        return float(out) if out.ndim == 0 else out
    p = 2 * (K - 1)
    logc = math.log(2 * (K - 1)) + 2 * (special.gammaln(2 * K) - 2 * special.gammaln(K))
    vals = []
    for f in Fa.ravel():
        c = 2 - 4 * f
        g = lambda u: math.exp(-p * (u + math.log1p(math.exp(-2 * u) + c * math.exp(-u))))
        width = math.sqrt(max(1 - f, 1e-300))
        pts = [min(width, 1.0), 1.0, 5.0]
        a, _ = _quad(g, 0.0, 40.0 / p + 10.0, cfg, points=sorted(set(pts)))
        tail, _ = _quad(g, 40.0 / p + 10.0, np.inf, cfg)
        vals.append(math.exp(logc + p * math.log(f * (1 - f))) * (a + tail))
    out = np.asarray(vals).reshape(Fa.shape)
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------------ Z(x) on the real line


def h_k(x, k: int):
    """``H_k(x) = -[w^(k-1) + w^-(k-1)] / sqrt(x^2/4 - 1)`` with ``w = x/2 + sqrt(x^2/4 - 1)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 2 + 1e-6):
        raise DomainError("x must exceed 2")
    r = np.sqrt(x * x / 4 - 1)
    out = -((x / 2 + r) ** (k - 1) + (x / 2 - r) ** (k - 1)) / r
    return float(out) if out.ndim == 0 else out


def _powers(N, K):
    k = np.arange(1, N + 1)[:, None]
    l = np.arange(1, N + 1)[None, :]
    return k, k - 1 + 2 * (K - N + l)


def a_matrices(x: float, N: int, K: int, cfg: QuadConfig = QuadConfig(abs_tol=1e-300, rel_tol=1e-12)):
    """The real matrices ``A_1(x)``, ``A_2(x)`` for ``x > 2``.

    ``A_1`` integrates ``cosh((k-1)u) Gamma(p) / (2 cosh u + x)^p`` over
    ``u >= 0`` and ``A_2`` integrates ``cos((k-1)u) Gamma(p) / (2 cos u + x)^p``
    over ``[0, pi]``, both times four, with ``p = k - 1 + 2(K - N + l)``.
    """
    if K < N:
        raise DomainError("the determinant form needs K >= N")
    A1 = np.empty((N, N))
    A2 = np.empty((N, N))
    for i in range(N):
        for j in range(N):
            k, p = i + 1, (i) + 2 * (K - N + j + 1)
            lg = special.gammaln(p)
            f1 = lambda u: 0.5 * (1 + math.exp(-2 * (k - 1) * u)) * math.exp(
                lg + (k - 1) * u - p * (u + math.log1p(math.exp(-2 * u) + x * math.exp(-u)))
            )
            f2 = lambda u: math.cos((k - 1) * u) * math.exp(lg - p * math.log(2 * math.cos(u) + x))
            A1[i, j] = 4 * _quad(f1, 0.0, 200.0, cfg, points=[1.0, 5.0, 20.0])[0]
            pts = [math.pi - math.sqrt(x - 2)] if x < 2 + math.pi**2 else None
            A2[i, j] = 4 * _quad(f2, 0.0, math.pi, cfg, points=pts)[0]
    return A1, A2


def z_of_x(x: float, N: int, K: int) -> float:
    """``Z(x) = det A_1(x)`` on the real axis (``x > 2`` for the matrix form).

    For ``-2 < x <= 2`` the complex-path evaluator :func:`z_complex` is used.
    """
    if x > 2:
        return float(np.linalg.det(a_matrices(x, N, K)[0]))
    if x <= -2:
        raise DomainError("Z has a cut for x <= -2")
    return float(z_complex(np.array([x + 0j]), N, K)[0].real)


def z_of_x_y_form(x: float, N: int, K: int) -> float:
    """``Z(x)`` from the ``y``-integral representation (independent cross-check)."""
    M = np.empty((N, N))
    for i in range(N):
        for j in range(N):
            k, p = i + 1, i + 2 * (K - N + j + 1)
            lg = special.gammaln(p)
            f = lambda y: math.exp(lg + (k - 2) * math.log(y) - p * math.log(y + 1 / y + x))
            M[i, j] = 2 * (
                integrate.quad(f, 0, 1, epsabs=0, epsrel=1e-12, limit=400)[0]
                + integrate.quad(f, 1, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
            )
    return float(np.linalg.det(M))


def im_z_minus(x: float, N: int, K: int) -> float:
    """``Im Z(-x - i0)`` for ``x > 2``, i.e. ``Im det(A_1 - i A_2)``.

    The complex determinant is taken from an LU factorization
    (:func:`numpy.linalg.det`).
    """
    if x <= 2:
        raise DomainError("x must exceed 2")
    A1, A2 = a_matrices(x, N, K)
    return float(np.linalg.det(A1 - 1j * A2).imag)


# ------------------------------------------------------------------ Z(lambda) off the axis

_TU, _WU = leggauss(24)
_TAIL = (1.0, 2.0, 4.0, 8.0, 16.0, 24.0, 32.0, 48.0)


def _panel_rule(edges):
    e = np.asarray(edges, dtype=float)
    a, b = e[:-1, None], e[1:, None]
    return (0.5 * (b - a) * _TU + 0.5 * (a + b)).ravel(), (0.5 * (b - a) * _WU + 0 * a).ravel()


def _graded(scale, top):
    # Geometric panels resolving a feature of width ``scale`` at the origin.
    g, h = [0.0], scale / 16
    while h < top:
        g.append(h)
        h *= 2
    g.append(top)
    return g


def _z_matrix(lam: complex, N: int, K: int, delta: float = np.pi / 3):
    k, p = _powers(N, K)
    p = p.astype(float)
    lg = special.gammaln(p)

    def f(u):
        u = u[:, None, None]
        return np.cosh((k - 1) * u) * np.exp(lg - p * np.log(2 * np.cosh(u) + lam))

    sc = math.sqrt(abs(2 + lam))
    if lam.real < -1.5 and lam.imag >= 0:
        # Near the cut the real path passes close to a pole of the integrand.
        # Rotate it to u = i t (0 <= t <= delta), then u = s + i delta, where
        # |2 cosh u + lam| stays bounded below.
        t, wt = _panel_rule(_graded(sc, delta))
        val = np.einsum("mij,m->ij", f(1j * t), 1j * wt)
        s, ws = _panel_rule((0.0, 0.5) + _TAIL)
        val = val + np.einsum("mij,m->ij", f(s + 1j * delta), ws)
    else:
        edges = _graded(sc, 1.0) if sc < 1 else [0.0, 0.5, 1.0]
        u, wu = _panel_rule(edges[:-1] + list(_TAIL))
        val = np.einsum("mij,m->ij", f(u.astype(complex)), wu)
    return 4 * val


def z_complex(lam, N: int, K: int) -> np.ndarray:
    """``Z(lambda)`` for complex ``lambda`` with ``Im lambda >= 0`` or ``lambda > -2``.

    Values on the cut itself are the limits from above, ``Z(-x + i0)``.
    """
    if K < N:
        raise DomainError("the determinant form needs K >= N")
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    return np.array([np.linalg.det(_z_matrix(complex(l), N, K)) for l in lam])


@lru_cache(maxsize=None)
def _jacobi_rule(m: int, n: int = 40):
    x, w = special.roots_jacobi(n, -0.5, m)
    return 0.5 * (x + 1), w * 2.0 ** (-(m + 0.5))


def kappa(z, KN: int) -> np.ndarray:
    """Kernel turning ``Im Z`` into the density of ``sqrt F``.

    With ``m = 2KN - 3``,

        kappa(z) = Gamma(KN)^2 sqrt(2) (2 - z)^(m + 1/2) / (pi m!)
                   * int_0^1 s^m (1-s)^(-1/2) (1 + z/2 + (1 - z/2) s)^(-1/2) ds,

    which is the analytic form of
    ``-(2 Gamma(KN)^2 / (pi m!)) int_{z/2}^1 (z - 2v)^m (1 - v^2)^(-1/2) dv``.
    It is purely imaginary for real ``z > 2`` and satisfies
    ``E[kappa(z / sqrt(T)) / sqrt(T)] = exp(-z)`` for ``T`` a product of two
    independent ``Gamma(KN)`` variables.  The integral is done by
    Gauss-Jacobi quadrature, so there is no cancellation near ``z = 2``.
    """
    m = 2 * KN - 3
    z = np.asarray(z, dtype=complex)
    s, w = _jacobi_rule(m)
    v = z[..., None] / 2 + (1 - z[..., None] / 2) * s
    integ = (1 + v) ** -0.5 @ w
    lpre = 2 * special.gammaln(KN) - math.log(math.pi) - special.gammaln(m + 1) + 0.5 * math.log(2)
    return np.exp(lpre) * (2 - z) ** (m + 0.5) * integ


def b_kernel(x: float, F: float, N: int, K: int, cfg: QuadConfig = QuadConfig(abs_tol=1e-300, rel_tol=1e-12)) -> float:
    """The kernel ``B(x)`` of the real-axis representation, as printed.

    ``F^(KN-1) int_2^{2/sqrt F} dy theta(x - y) (x - y)^(2KN-3) / (sqrt(1 - F y^2/4) (2KN-3)!)``
    with ``y = (2/sqrt F) sin(t)`` removing the endpoint singularity.
    """
    if not 0 < F < 1:
        raise DomainError("F must lie in (0, 1)")
    m = 2 * K * N - 3
    x0 = 2 / math.sqrt(F)
    if x <= 2:
        return 0.0
    t0 = math.asin(math.sqrt(F))
    t1 = math.asin(min(1.0, x * math.sqrt(F) / 2))
    if t1 <= t0:
        return 0.0
    f = lambda t: (x - x0 * math.sin(t)) ** m
    val, _ = _quad(f, t0, t1, cfg)
    return math.exp((K * N - 1) * math.log(F) + math.log(x0) - special.gammaln(m + 1)) * val


# ------------------------------------------------------------------ W pipeline

_TT, _WT = leggauss(16)


def _theta_rule(phi):
    # The integrand has structure of width ~2(1-phi) at theta = 0 (branch
    # point of Z at -2 close to the start of the path) and ~phi at
    # theta = pi (Z varies on an O(1) scale near lambda = 0).
    cuts = {0.0, np.pi / 2, np.pi}
    h = 2 * (1 - phi) / 8
    while h < np.pi / 2:
        cuts.add(h)
        h *= 2
    h = phi / 8
    while h < np.pi / 2:
        cuts.add(np.pi - h)
        h *= 2
    e = np.array(sorted(cuts))
    a, b = e[:-1, None], e[1:, None]
    return (0.5 * (b - a) * _TT + 0.5 * (a + b)).ravel(), (0.5 * (b - a) * _WT + 0 * a).ravel()


def _phi_rule(panels=8, order=20):
    # phi = 1 - (1 - s)^2 turns the sqrt(1 - phi) edge behaviour into a
    # polynomial one so composite Gauss-Legendre converges quickly.
    t, w = leggauss(order)
    e = np.linspace(0.0, 1.0, panels + 1)
    a, b = e[:-1, None], e[1:, None]
    s = (0.5 * (b - a) * t + 0.5 * (a + b)).ravel()
    ws = (0.5 * (b - a) * w + 0 * a).ravel()
    return 1 - (1 - s) ** 2, ws * 2 * (1 - s)


class WPipeline:
    """Symmetric fidelity density ``P_{N,K}(F)`` for ``K >= N``.

    Parameters
    ----------
    N, K : int
        Dimension and ancilla size, ``K >= N``.
    tolerance : float, optional
        Maximum accepted deviation of the normalization factor from 1.

    Examples
    --------
    >>> w = WPipeline(2, 2)
    >>> F = 0.5
    >>> exact = 4.5 * F * (1 - F)  # the arccos term vanishes at F = 1/2
    >>> abs(w.pdf(F) - exact) < 1e-8
    True
    """

    def __init__(self, N: int, K: int, tolerance: float = 0.01):
        if int(N) != N or int(K) != K or N < 1:
            raise DomainError("N and K must be positive integers")
        if K < N:
            raise DomainError("the determinant form needs K >= N")
        self.N, self.K = int(N), int(K)
        self.tolerance = tolerance
        self.z0 = float(z_complex(0j, self.N, self.K)[0].real)
        self._norm = None

    def w(self, phi: float) -> float:
        """Unnormalized density of ``sqrt F`` at ``phi`` in ``(0, 1)``."""
        if not 0 < phi < 1:
            raise DomainError("phi must lie in (0, 1)")
        a = 1 / phi
        th, wt = _theta_rule(phi)
        lam = -a - a * np.cos(th) + 1j * a * np.sin(th)
        dlam = a * np.sin(th) + 1j * a * np.cos(th)
        z = z_complex(lam, self.N, self.K)
        kz = kappa(-lam * phi, self.N * self.K)
        val = -np.sum(wt * z * kz * dlam).imag / (np.pi * self.z0)
        return float(val)

    def _normalize(self):
        if self._norm is None:
            phis, wts = _phi_rule()
            vals = np.array([self.w(p) for p in phis])
            norm = float(wts @ vals)
            self._norm = norm
            self._moments = {
                m: float(wts @ (vals * phis**m)) / norm for m in range(1, 5)
            }
            if abs(norm - 1) > self.tolerance:
                raise NormalizationDrift(f"normalization factor {norm:.6g}")
        return self._norm

    @property
    def normalization(self) -> float:
        """Integral of the raw density over ``[0, 1]`` (ideally 1)."""
        return self._normalize()

    def moment(self, m: int) -> float:
        """``<(sqrt F)^m>`` of the renormalized curve, ``m = 1..4``."""
        self._normalize()
        return self._moments[m]

    def pdf(self, F):
        """Renormalized density ``P(F) = W(sqrt F) / (2 sqrt F)``, clipped at 0."""
        Fa = _check_F(F)
        norm = self._normalize()
        out = np.array([self.w(math.sqrt(f)) / (2 * math.sqrt(f)) for f in Fa.ravel()])
        out = np.clip(out / norm, 0.0, None).reshape(Fa.shape)
        return float(out) if out.ndim == 0 else out

    def curve(self, grid) -> DistributionCurve:
        grid = np.asarray(grid, dtype=float)
        return DistributionCurve(
            grid,
            self.pdf(grid),
            normalization=self.normalization,
            provenance="quadrature",
            meta={"N": self.N, "K": self.K, "family": "sym-nk"},
        )


@lru_cache(maxsize=16)
def _pipeline(N, K):
    return WPipeline(N, K)


def pdf_fidelity_NK(F, N: int, K: int):
    """Symmetric fidelity density for ``mu_{N,K}``, ``K >= N`` (see :class:`WPipeline`)."""
    return _pipeline(int(N), int(K)).pdf(F)
