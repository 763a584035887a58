"""Random pure states, Haar unitaries and random density matrices.

Randomness is always drawn from an explicit :class:`numpy.random.Generator`.
:class:`RngStream` builds one from a ``(seed, stream_id)`` pair using the
PCG64 bit generator keyed by ``SeedSequence(seed, spawn_key=(stream_id,))``,
so equal pairs give identical streams and distinct stream ids give
independent ones.

Each sampler comes in two forms: a scalar one returning a validated
:class:`~randfid.states.DensityMatrix` and a ``*_batch`` form returning a
plain ``(count, N, N)`` array for the Monte Carlo harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import interpolate, special

from .errors import DomainError, McmcNotConverged, OffSimplex
from .states import DensityMatrix, PureState, validate_pure, validate_state

__all__ = [
    "RngStream",
    "MeasureSpec",
    "BuresMcmcConfig",
    "as_generator",
    "ginibre",
    "haar_unitary",
    "sample_pure",
    "sample_induced",
    "sample_hs",
    "sample_bures",
    "sample_real_induced",
    "sample_batch",
    "pdf_induced_eigs",
    "pdf_bures_eigs",
    "bures_radius_inverse_cdf",
]


# ------------------------------------------------------------------ RNG plumbing


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by a seed and a stream id.

    ``path`` addresses child streams (see :meth:`substream`); the generator is
    PCG64 seeded by ``SeedSequence(seed, spawn_key=(stream_id, *path))``.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()

    def generator(self) -> np.random.Generator:
        key = (int(self.stream_id),) + tuple(int(p) for p in self.path)
        ss = np.random.SeedSequence(int(self.seed), spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, index: int) -> "RngStream":
        """Independent child stream number ``index``."""
        return RngStream(self.seed, self.stream_id, self.path + (int(index),))


def as_generator(rng) -> np.random.Generator:
    """Coerce ``None``, an int seed, an :class:`RngStream` or a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


# ------------------------------------------------------------------ measures


_KINDS = ("induced", "hs", "bures", "fs", "real")


@dataclass(frozen=True)
class MeasureSpec:
    """Tagged description of a measure on states.

    Parameters
    ----------
    kind : {'induced', 'hs', 'bures', 'fs', 'real'}
        ``'hs'`` and ``'fs'`` are shorthands for ``induced`` with ``K = N``
        and ``K = 1``; ``'real'`` is the real (rebit-type) induced measure.
    N : int
        Hilbert space dimension.
    K : int, optional
        Ancilla dimension for the induced families.
    """

    kind: str
    N: int
    K: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown measure kind {self.kind!r}")
        if int(self.N) < 1:
            raise DomainError("N must be at least 1")
        if self.kind in ("induced", "real"):
            if self.K is None or int(self.K) != self.K or self.K < 1:
                raise DomainError("induced measures need an integer K >= 1")

    @classmethod
    def induced(cls, N, K):
        return cls("induced", N, K)

    @classmethod
    def hilbert_schmidt(cls, N):
        return cls("hs", N)

    @classmethod
    def fubini_study(cls, N):
        return cls("fs", N)

    @classmethod
    def bures(cls, N):
        return cls("bures", N)

    @classmethod
    def real_induced(cls, N, K):
        return cls("real", N, K)

    def canonical(self) -> "MeasureSpec":
        """Map the HS and Fubini-Study shorthands onto the induced family."""
        if self.kind == "hs":
            return MeasureSpec("induced", self.N, self.N)
        if self.kind == "fs":
            return MeasureSpec("induced", self.N, 1)
        return self

    def label(self) -> str:
        c = self.canonical()
        if c.kind in ("induced", "real"):
            return f"{c.kind}(N={c.N},K={c.K})"
        return f"{c.kind}(N={c.N})"


@dataclass(frozen=True)
class BuresMcmcConfig:
    """Tuning of the simplex Metropolis-Hastings sampler.

    Attributes
    ----------
    burn_in : int
        Discarded steps per chain.
    thinning : int
        Steps between retained states.
    proposal_concentration : float
        Dirichlet proposal concentration ``c``; the proposal from ``lam`` is
        ``Dirichlet(c * lam + 1/2)``.
    max_chains : int
        Number of chains advanced in lock-step.
    min_acceptance : float
        Below this acceptance rate the run is declared non-converged.
    """

    burn_in: int = 10_000
    thinning: int = 10
    proposal_concentration: float = 50.0
    max_chains: int = 1024
    min_acceptance: float = 0.02

    def __post_init__(self):
        if self.burn_in < 0 or self.thinning < 1 or self.proposal_concentration <= 0:
            raise DomainError("invalid Bures MCMC configuration")


# ------------------------------------------------------------------ primitives


def ginibre(rows: int, cols: int, rng=None, size=None) -> np.ndarray:
    """Matrix of i.i.d. standard complex normals, ``E|z|^2 = 1``.

    Parameters
    ----------
    rows, cols : int
    rng : Generator, RngStream, int or None
    size : int, optional
        If given, a stack of ``size`` matrices is returned.
    """
    g = as_generator(rng)
    shape = (rows, cols) if size is None else (size, rows, cols)
    z = g.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def haar_unitary(N: int, rng=None, size=None) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix.

    The columns of ``Q`` are multiplied by the conjugate phases of the
    diagonal of ``R``, which makes the decomposition unique and the law of
    ``Q`` exactly Haar.
    """
    z = ginibre(N, N, rng, size)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.where(np.abs(d) == 0, 1.0, np.abs(d))
    return q * np.conj(ph)[..., None, :]


def sample_pure(N: int, rng=None) -> PureState:
    """Random pure state from the unitarily invariant (Fubini-Study) measure."""
    v = ginibre(N, 1, rng)[:, 0]
    return validate_pure(v / np.linalg.norm(v))


def _wishart_normalize(phi):
    rho = phi @ np.conj(np.swapaxes(phi, -1, -2))
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    return rho / tr[..., None, None]


def sample_induced(N: int, K: int, rng=None) -> DensityMatrix:
    """Density matrix from the induced measure ``mu_{N,K}``.

    ``rho = Phi Phi^dagger / Tr(Phi Phi^dagger)`` with ``Phi`` an N x K
    Ginibre matrix; the rank is ``min(N, K)``.
    """
    _check_nk(N, K)
    return validate_state(_wishart_normalize(ginibre(N, int(K), rng)))


def sample_hs(N: int, rng=None) -> DensityMatrix:
    """Hilbert-Schmidt distributed density matrix (``K = N``)."""
    return sample_induced(N, N, rng)


def sample_real_induced(N: int, K: int, rng=None) -> DensityMatrix:
    """Real symmetric density matrix ``G G^T / Tr(G G^T)``, ``G`` real normal."""
    _check_nk(N, K)
    g = as_generator(rng).standard_normal((N, int(K)))
    return validate_state(_wishart_normalize(g.astype(complex)))


def _check_nk(N, K):
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    if int(K) != K or K < 1:
        raise DomainError("K must be a positive integer")


# ------------------------------------------------------------------ Bures, N = 2


@lru_cache(maxsize=1)
def _bures_theta_table(n: int = 4096):
    # r = (sqrt(2)/2) sin(theta) turns P_B(r) dr into (4/pi) sin^2(theta) d theta,
    # whose CDF on [0, pi/2] is (2 theta - sin 2 theta) / pi.
    th = np.linspace(0.0, np.pi / 2, n)
    cdf = (2 * th - np.sin(2 * th)) / np.pi
    return interpolate.PchipInterpolator(cdf, th)


def bures_radius_inverse_cdf(u) -> np.ndarray:
    """Inverse CDF of the qubit Bures radial law ``(8/pi) r^2 / sqrt(1/2 - r^2)``.

    A monotone table in the angle variable gives a starting point that two
    Newton steps polish to machine precision.
    """
    u = np.asarray(u, dtype=float)
    th = _bures_theta_table()(u)
    for _ in range(2):
        f = (2 * th - np.sin(2 * th)) / np.pi - u
        fp = 4 * np.sin(th) ** 2 / np.pi
        th = np.where(fp > 1e-300, th - f / np.where(fp > 1e-300, fp, 1.0), th)
        th = np.clip(th, 0.0, np.pi / 2)
    return np.sqrt(2.0) / 2 * np.sin(th)


_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


def _bures_qubits(count, g):
    r = bures_radius_inverse_cdf(g.random(count))
    d = g.standard_normal((count, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    tau = r[:, None] * d
    return 0.5 * np.eye(2) + np.einsum("nk,kij->nij", tau, _PAULI) / np.sqrt(2.0)


# ------------------------------------------------------------------ Bures, N >= 3


def _log_bures_target(lam):
    n = lam.shape[-1]
    i, j = np.triu_indices(n, 1)
    li, lj = lam[..., i], lam[..., j]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            np.sum(2 * np.log(np.abs(li - lj)) - np.log(li + lj), axis=-1)
            - 0.5 * np.sum(np.log(lam), axis=-1)
        )
    return np.where(np.all(lam > 0, axis=-1), out, -np.inf)


def _log_dirichlet(x, alpha):
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            special.gammaln(alpha.sum(-1))
            - special.gammaln(alpha).sum(-1)
            + np.sum((alpha - 1) * np.log(x), axis=-1)
        )


def bures_spectra(N: int, count: int, rng=None, cfg: BuresMcmcConfig = None):
    """Eigenvalue vectors distributed by the Bures density on the simplex.

    Runs ``min(count, cfg.max_chains)`` independent Metropolis-Hastings chains
    in lock-step.  Each proposal is ``Dirichlet(c * lam + 1/2)`` and the
    acceptance ratio carries the Hastings correction for this asymmetric
    kernel.

    Returns
    -------
    spectra : ndarray, shape (count, N)
    acceptance : float
        Mean acceptance rate over the retained part of the run.
    """
    cfg = cfg or BuresMcmcConfig()
    g = as_generator(rng)
    chains = max(1, min(count, cfg.max_chains))
    per_chain = -(-count // chains)
    c = cfg.proposal_concentration
    lam = g.dirichlet(np.ones(N), size=chains)
    logp = _log_bures_target(lam)
    kept = np.empty((per_chain, chains, N))
    accepted = 0
    total = cfg.burn_in + per_chain * cfg.thinning
    for step in range(total):
        alpha = c * lam + 0.5
        prop = _dirichlet_rows(g, alpha)
        logp_new = _log_bures_target(prop)
        log_q_fwd = _log_dirichlet(prop, alpha)
        log_q_back = _log_dirichlet(lam, c * prop + 0.5)
        with np.errstate(invalid="ignore"):
            log_a = logp_new - logp + log_q_back - log_q_fwd
        ok = np.log(g.random(chains)) < np.nan_to_num(log_a, nan=-np.inf)
        lam = np.where(ok[:, None], prop, lam)
        logp = np.where(ok, logp_new, logp)
        if step >= cfg.burn_in:
            accepted += int(ok.sum())
            k, rem = divmod(step - cfg.burn_in + 1, cfg.thinning)
            if rem == 0:
                kept[k - 1] = lam
    rate = accepted / max(1, chains * (total - cfg.burn_in))
    if total > cfg.burn_in and rate < cfg.min_acceptance:
        raise McmcNotConverged(f"acceptance rate {rate:.3g} is too low")
    out = np.swapaxes(kept, 0, 1).reshape(-1, N)[:count]
    return out, rate


def _dirichlet_rows(g, alpha):
    # Row-wise Dirichlet via normalized gammas (numpy's dirichlet takes one alpha).
    x = g.standard_gamma(alpha)
    s = x.sum(axis=-1, keepdims=True)
    return x / s


def _conjugate(spectra, g):
    n = spectra.shape[-1]
    u = haar_unitary(n, g, size=spectra.shape[0])
    return (u * spectra[:, None, :]) @ np.conj(np.swapaxes(u, -1, -2))


def sample_bures(N: int, rng=None, cfg: BuresMcmcConfig = None) -> DensityMatrix:
    """Density matrix distributed by the Bures measure.

    Qubits are drawn exactly (radial inverse CDF plus a uniform direction).
    For ``N >= 3`` the spectrum comes from :func:`bures_spectra` and is
    conjugated by an independent Haar unitary.
    """
    return validate_state(sample_batch(MeasureSpec.bures(N), 1, rng, cfg)[0])


# ------------------------------------------------------------------ batches


def sample_batch(spec: MeasureSpec, count: int, rng=None, cfg=None) -> np.ndarray:
    """Draw ``count`` density matrices from ``spec`` as an array.

    Parameters
    ----------
    spec : MeasureSpec
    count : int
    rng : Generator, RngStream, int or None
    cfg : BuresMcmcConfig, optional
        Only used for Bures measures with ``N >= 3``.

    Returns
    -------
    ndarray of complex, shape (count, N, N)
    """
    g = as_generator(rng)
    s = spec.canonical()
    if s.kind == "induced":
        return _wishart_normalize(ginibre(s.N, s.K, g, size=count))
    if s.kind == "real":
        x = g.standard_normal((count, s.N, s.K))
        return _wishart_normalize(x.astype(complex))
    if s.kind == "bures":
        if s.N == 1:
            return np.ones((count, 1, 1), dtype=complex)
        if s.N == 2:
            return _bures_qubits(count, g)
        spectra, _ = bures_spectra(s.N, count, g, cfg)
        return _conjugate(spectra, g)
    raise DomainError(f"cannot sample {spec!r}")  # pragma: no cover


# ------------------------------------------------------------------ densities


def _check_simplex(lams, tol=1e-10):
    lam = np.asarray(lams, dtype=float)
    if np.any(lam < -tol) or abs(lam.sum() - 1.0) > tol:
        raise OffSimplex("eigenvalues must be non-negative and sum to one")
    return np.clip(lam, 0.0, None)


def _log_vandermonde_sq(lam):
    i, j = np.triu_indices(lam.size, 1)
    d = np.abs(lam[i] - lam[j])
    if np.any(d == 0):
        return -np.inf
    return float(2 * np.sum(np.log(d)))


def log_induced_constant(N, K) -> float:
    """Log of ``Gamma(KN) / prod_j Gamma(K - j) Gamma(N - j + 1)``."""
    j = np.arange(N)
    return float(
        special.gammaln(K * N)
        - np.sum(special.gammaln(K - j))
        - np.sum(special.gammaln(N - j + 1))
    )


def log_bures_constant(N) -> float:
    """Log of ``2^(N^2-N) Gamma(N^2/2) / (pi^(N/2) Gamma(1)...Gamma(N+1))``."""
    return float(
        (N * N - N) * math.log(2)
        + special.gammaln(N * N / 2)
        - 0.5 * N * math.log(math.pi)
        - np.sum(special.gammaln(np.arange(1, N + 2)))
    )


def pdf_induced_eigs(lams, N: int, K: float) -> float:
    """Joint eigenvalue density of ``mu_{N,K}`` with respect to the flat simplex.

    Parameters
    ----------
    lams : array_like, shape (N,)
        Point of the simplex.
    N : int
    K : float
        Requires ``K > N - 1`` so that every normalizing Gamma is finite.
    """
    lam = _check_simplex(lams)
    if lam.size != N:
        raise OffSimplex("wrong number of eigenvalues")
    if K <= N - 1:
        raise DomainError("the induced density needs K > N - 1")
    lv = _log_vandermonde_sq(lam)
    if not np.isfinite(lv):
        return 0.0
    with np.errstate(divide="ignore"):
        lp = (K - N) * np.sum(np.log(lam)) if K != N else 0.0
    return float(np.exp(log_induced_constant(N, K) + lv + lp))


def pdf_bures_eigs(lams, N: int) -> float:
    """Joint eigenvalue density of the Bures measure on the flat simplex."""
    lam = _check_simplex(lams)
    if lam.size != N:
        raise OffSimplex("wrong number of eigenvalues")
    if N > 1 and not np.isfinite(_log_vandermonde_sq(lam)):
        return 0.0
    if np.any(lam == 0):
        return float("inf")
    val = _log_bures_target(lam[None, :])[0]
    if not np.isfinite(val):
        return 0.0
    return float(np.exp(log_bures_constant(N) + val))
