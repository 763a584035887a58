"""Density matrices, pure states and the fidelity family of metrics.

Every routine accepts either the validated containers defined here or plain
array-likes (which are validated on entry).  The ``*_batch`` helpers work on
stacks of matrices with shape ``(..., N, N)`` and skip validation; they are
what the Monte Carlo harness uses.

Examples
--------
>>> import numpy as np
>>> from randfid.states import validate_state, fidelity
>>> rho = validate_state(np.diag([0.75, 0.25]))
>>> sigma = validate_state(np.eye(2) / 2)
>>> round(fidelity(rho, sigma), 5)
0.93301
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import VALIDITY_TOL
from .errors import (
    DimMismatch,
    EigenFailure,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)

__all__ = [
    "DensityMatrix",
    "PureState",
    "BlochVector",
    "validate_state",
    "validate_pure",
    "psd_sqrt",
    "fidelity",
    "root_fidelity",
    "fidelity_n2",
    "fidelity_pure_mixed",
    "fidelity_max_mixed",
    "bures_distance",
    "hs_distance",
    "bures_angle",
    "to_bloch",
    "from_bloch",
    "root_fidelity_batch",
    "fidelity_batch",
    "max_mixed_root_fidelity_batch",
]

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)
#: Hilbert-Schmidt radius of the qubit Bloch ball in the normalized Pauli basis.
BLOCH_RADIUS = np.sqrt(2.0) / 2


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """A validated N x N density matrix.

    Instances are immutable; build them with :func:`validate_state` (or the
    samplers) rather than directly.

    Attributes
    ----------
    entries : ndarray of complex, shape (N, N)
        Read-only matrix entries.
    eigenvalues : ndarray of float, shape (N,)
        Ascending spectrum, clamped at zero.
    """

    entries: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > VALIDITY_TOL))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class PureState:
    """A normalized state vector."""

    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> DensityMatrix:
        psi = self.amplitudes
        m = np.outer(psi, psi.conj())
        ev = np.zeros(self.dim)
        ev[-1] = 1.0
        return DensityMatrix(_frozen(m), ev)


@dataclass(frozen=True)
class BlochVector:
    """Qubit state coordinates in the normalized Pauli basis.

    ``rho = 1/2 + tau . sigma / sqrt(2)``, so the pure states sit on the
    sphere of radius ``sqrt(2)/2``.
    """

    tau: np.ndarray

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.tau))


def _eigh(m):
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenFailure(str(exc)) from exc


def validate_state(m, tol: float = VALIDITY_TOL) -> DensityMatrix:
    """Check that ``m`` is a density matrix and wrap it.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero and the matrix is
    rebuilt and renormalized to unit trace.

    Parameters
    ----------
    m : array_like or DensityMatrix
        Square complex matrix.
    tol : float, optional
        Tolerance for Hermiticity, trace and positivity.

    Returns
    -------
    DensityMatrix

    Raises
    ------
    NotHermitian, TraceNotOne, NotPSD
    """
    if isinstance(m, DensityMatrix):
        return m
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise NotHermitian("matrix is not Hermitian")
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace is {tr!r}")
    a = 0.5 * (a + a.conj().T)
    w, v = _eigh(a)
    if w[0] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[0]!r} is negative")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        a = (v * w) @ v.conj().T
    return DensityMatrix(_frozen(a), np.clip(w, 0.0, None))


def validate_pure(psi, tol: float = VALIDITY_TOL) -> PureState:
    """Wrap a unit vector as a :class:`PureState`."""
    if isinstance(psi, PureState):
        return psi
    v = np.asarray(psi, dtype=complex).ravel()
    nrm = np.vdot(v, v).real
    if abs(nrm - 1.0) > tol:
        raise TraceNotOne(f"squared norm is {nrm!r}")
    v = v.copy()
    v.setflags(write=False)
    return PureState(v)


def _pair(rho1, rho2):
    a, b = validate_state(rho1), validate_state(rho2)
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions {a.dim} and {b.dim} differ")
    return a, b


def psd_sqrt(rho) -> np.ndarray:
    """Principal square root of a density matrix via its spectrum.

    Examples
    --------
    >>> import numpy as np
    >>> np.allclose(psd_sqrt(np.diag([0.25, 0.75])), np.diag([0.5, np.sqrt(0.75)]))
    True
    """
    r = validate_state(rho)
    w, v = _eigh(r.entries)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


# ---------------------------------------------------------------- batched core


def _clean(w):
    # Spectral values below a few ulps of the largest one are rounding noise
    # around an exact zero; taking their square root would turn ~1e-17 into
    # ~1e-9, so they are set to zero.
    cut = 16 * np.finfo(float).eps * np.max(np.abs(w), axis=-1, keepdims=True)
    return np.where(w > cut, w, 0.0)


def _sqrt_batch(a):
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(_clean(w))[..., None, :]) @ np.conj(
        np.swapaxes(v, -1, -2)
    )


def root_fidelity_batch(a, b) -> np.ndarray:
    """Root fidelity ``Tr sqrt(sqrt(a) b sqrt(a))`` for stacks of matrices.

    No validation is performed.  The inner product matrix is re-Hermitized
    and spectral values within rounding of zero are set to zero, so
    rank-deficient inputs keep full accuracy.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    s = _sqrt_batch(a)
    m = s @ b @ s
    m = 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
    w = np.linalg.eigvalsh(m)
    out = np.sqrt(_clean(w)).sum(axis=-1)
    return np.clip(out, 0.0, 1.0)


def fidelity_batch(a, b) -> np.ndarray:
    """Squared counterpart of :func:`root_fidelity_batch`."""
    return root_fidelity_batch(a, b) ** 2


def max_mixed_root_fidelity_batch(a) -> np.ndarray:
    """``Tr sqrt(rho) / sqrt(N)`` for a stack of density matrices."""
    a = np.asarray(a)
    w = np.linalg.eigvalsh(a)
    n = a.shape[-1]
    return np.sqrt(_clean(w)).sum(axis=-1) / np.sqrt(n)


# ---------------------------------------------------------------- public metrics


def root_fidelity(rho1, rho2) -> float:
    """Root fidelity ``sqrt(F)``, computed without squaring first.

    Parameters
    ----------
    rho1, rho2 : DensityMatrix or array_like
        States of equal dimension.

    Returns
    -------
    float
        A number in ``[0, 1]``.
    """
    a, b = _pair(rho1, rho2)
    try:
        return float(root_fidelity_batch(a.entries, b.entries))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenFailure(str(exc)) from exc


def fidelity(rho1, rho2) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))**2``.

    Examples
    --------
    >>> import numpy as np
    >>> rho = np.diag([0.75, 0.25])
    >>> abs(fidelity(rho, np.eye(2) / 2) - (4 + 2 * np.sqrt(3)) / 8) < 1e-12
    True
    """
    return root_fidelity(rho1, rho2) ** 2


def fidelity_n2(rho1, rho2) -> float:
    """Qubit shortcut ``Tr(rho1 rho2) + sqrt((1 - Tr rho1^2)(1 - Tr rho2^2))``."""
    a, b = _pair(rho1, rho2)
    if a.dim != 2:
        raise DimMismatch("fidelity_n2 needs 2x2 states")
    p1 = np.vdot(a.entries, a.entries).real
    p2 = np.vdot(b.entries, b.entries).real
    overlap = np.vdot(a.entries, b.entries).real
    rad = max(1.0 - p1, 0.0) * max(1.0 - p2, 0.0)
    return float(np.clip(overlap + np.sqrt(rad), 0.0, 1.0))


def fidelity_pure_mixed(psi, rho) -> float:
    """Fidelity between a pure state and a density matrix, ``<psi|rho|psi>``."""
    p = validate_pure(psi)
    r = validate_state(rho)
    if p.dim != r.dim:
        raise DimMismatch(f"dimensions {p.dim} and {r.dim} differ")
    v = p.amplitudes
    return float(np.clip(np.vdot(v, r.entries @ v).real, 0.0, 1.0))


def fidelity_max_mixed(rho) -> float:
    """Fidelity with the maximally mixed state, ``(Tr sqrt(rho))**2 / N``."""
    r = validate_state(rho)
    return float(np.sum(np.sqrt(r.eigenvalues)) ** 2 / r.dim)


def bures_distance(rho1, rho2) -> float:
    """Bures distance ``sqrt(2 - 2 sqrt(F))``."""
    return float(np.sqrt(max(2.0 - 2.0 * root_fidelity(rho1, rho2), 0.0)))


def bures_angle(rho1, rho2) -> float:
    """Bures angle ``arccos(sqrt(F))``."""
    return float(np.arccos(np.clip(root_fidelity(rho1, rho2), 0.0, 1.0)))


def hs_distance(rho1, rho2) -> float:
    """Hilbert-Schmidt distance ``sqrt(Tr (rho1 - rho2)^2)``."""
    a, b = _pair(rho1, rho2)
    d = a.entries - b.entries
    return float(np.sqrt(max(np.vdot(d, d).real, 0.0)))


def to_bloch(rho) -> BlochVector:
    """Coordinates ``tau_i = Tr(rho sigma_i) / sqrt(2)`` of a qubit state."""
    r = validate_state(rho)
    if r.dim != 2:
        raise DimMismatch("Bloch coordinates are defined for qubits only")
    tau = np.einsum("kij,ji->k", _PAULI, r.entries).real / np.sqrt(2.0)
    if np.linalg.norm(tau) > BLOCH_RADIUS + VALIDITY_TOL:  # pragma: no cover
        raise DimMismatch("Bloch vector outside the ball")
    return BlochVector(tau)


def from_bloch(tau) -> DensityMatrix:
    """Inverse of :func:`to_bloch`."""
    t = tau.tau if isinstance(tau, BlochVector) else np.asarray(tau, dtype=float)
    if t.shape != (3,):
        raise DimMismatch("a Bloch vector has three components")
    m = 0.5 * np.eye(2) + np.einsum("k,kij->ij", t, _PAULI) / np.sqrt(2.0)
    return validate_state(m)

