"""Reference densities and figure-ready tables shared by the CLI and the verifier.

A *family* names one fidelity law:

``pure-pure``
    two random pure states of dimension ``N``;
``pure-induced``
    a random pure state against ``mu_{N,K}`` (``real=True`` for real states);
``pure-hs`` / ``pure-bures``
    a random pure state against the Hilbert-Schmidt or Bures measure;
``sym-2k``
    two qubit states both drawn from ``mu_{2,K}`` (``K = 3/2`` is Bures);
``sym-nk``
    two states both drawn from ``mu_{N,K}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analytic, distnum
from .errors import DomainError, UnsupportedK
from .montecarlo import ExperimentSpec, cdf_from_pdf, run_experiment, sweep
from .samplers import MeasureSpec

__all__ = ["FAMILIES", "Law", "law", "midpoint_grid", "dist_curve", "mean_table"]

FAMILIES = ("pure-pure", "pure-induced", "pure-hs", "pure-bures", "sym-2k", "sym-nk")


@dataclass
class Law:
    """A fidelity law: its analytic density (if any) and how to sample it."""

    family: str
    N: int
    K: float | None
    pdf: object
    provenance: str
    measures: tuple | None
    cdf_points: int = 401


def _pair(a, b=None):
    return (a, a if b is None else b)


def law(family: str, N: int = 2, K: float | None = None, real: bool = False) -> Law:
    """Look up the density and sampling measures for ``family``.

    Raises
    ------
    DomainError
        For unknown families or parameters outside a family's domain.
    """
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    if family == "pure-pure":
        return Law(family, N, 1, lambda F: analytic.pdf_pure_pure(N, F), "closed-form",
                   _pair(MeasureSpec.fubini_study(N)))
    if family in ("pure-induced", "pure-hs"):
        K = N if family == "pure-hs" else K
        if K is None:
            raise DomainError("pure-induced needs K")
        if real:
            meas = (MeasureSpec.real_induced(N, 1), MeasureSpec.real_induced(N, int(K)))
        elif float(K).is_integer():
            meas = (MeasureSpec.fubini_study(N), MeasureSpec.induced(N, int(K)))
        else:
            meas = None
        return Law(family, N, K, lambda F: analytic.pdf_pure_induced(N, K, F, real), "closed-form", meas)
    if family == "pure-bures":
        return Law(family, N, None, lambda F: distnum.pdf_pure_bures(N, F), "quadrature",
                   (MeasureSpec.fubini_study(N), MeasureSpec.bures(N)))
    if family == "sym-2k":
        if K is None or K < 1:
            raise DomainError("sym-2k needs K >= 1")
        if K == 1.5:
            meas = _pair(MeasureSpec.bures(2))
        elif float(K).is_integer():
            meas = _pair(MeasureSpec.induced(2, int(K)))
        else:
            meas = None
        try:
            analytic.pdf_fidelity_2K_closed(0.5, K)
            return Law(family, 2, K, lambda F: analytic.pdf_fidelity_2K_closed(F, K), "closed-form", meas)
        except UnsupportedK:
            return Law(family, 2, K, lambda F: distnum.pdf_fidelity_2K_integral(F, K), "quadrature", meas)
    # sym-nk
    if K is None or int(K) != K or K < 1:
        raise DomainError("sym-nk needs an integer K >= 1")
    K = int(K)
    meas = _pair(MeasureSpec.induced(N, K))
    if K == 1:
        return Law(family, N, K, lambda F: analytic.pdf_pure_pure(N, F), "closed-form", meas)
    if K >= N:
        return Law(family, N, K, lambda F: distnum.pdf_fidelity_NK(F, N, K), "quadrature", meas, 201)
    # Rank-deficient (K < N) symmetric laws have no reduced integral form;
    # only Monte Carlo data is available.
    return Law(family, N, K, None, "monte-carlo", meas)


def midpoint_grid(n: int = 50) -> np.ndarray:
    """``n`` bin midpoints on ``[0, 1]``."""
    if n < 1:
        raise DomainError("grid needs at least one point")
    return (np.arange(n) + 0.5) / n


def dist_curve(
    lw: Law,
    grid,
    mc_samples: int = 0,
    seed: int = 0,
    bins: int = 100,
    threads: int | None = None,
) -> dict:
    """Evaluate a law on ``grid`` and optionally overlay a Monte Carlo histogram.

    Returns
    -------
    dict
        Keys ``F``, ``pdf`` (NaN where no density is available),
        ``provenance`` and, with an overlay, ``hist``, ``hist_err``, ``ks``
        (``(D, p)`` or None), ``mc_mean``, ``mc_err``.
    """
    grid = np.asarray(grid, dtype=float)
    out = {"F": grid, "provenance": lw.provenance}
    out["pdf"] = np.asarray(lw.pdf(grid), dtype=float) if lw.pdf is not None else np.full(grid.shape, np.nan)
    if lw.pdf is None and not mc_samples:
        raise DomainError(f"{lw.family} N={lw.N} K={lw.K} has no analytic density; request an MC overlay")
    if mc_samples:
        if lw.measures is None:
            raise DomainError(f"no sampler for {lw.family} with K={lw.K}")
        cdf = cdf_from_pdf(lw.pdf, lw.cdf_points) if lw.pdf is not None else None
        spec = ExperimentSpec(lw.measures[0], lw.measures[1], int(mc_samples), seed, histogram_bins=bins)
        res = run_experiment(spec, reference_cdf=cdf, threads=threads)
        h = res.histogram
        idx = np.clip(np.searchsorted(h.meta["edges"], grid, side="right") - 1, 0, bins - 1)
        out.update(
            hist=h.pdf[idx],
            hist_err=h.pdf_err[idx],
            ks=res.ks_vs_reference,
            mc_mean=res.mean,
            mc_err=res.stderr,
        )
    return out


def mean_table(N_values, K_values, statistic="fidelity", mc_samples=0, seed=0, threads=None):
    """Symmetric means over a grid of ``(N, K)`` (see :func:`montecarlo.sweep`)."""
    return sweep(N_values, K_values, statistic, mc_samples, seed, threads)
