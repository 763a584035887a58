"""Seeded Monte Carlo estimates of fidelity statistics.

Pairs of states are drawn in fixed-size chunks.  Chunk ``c`` always uses
the random stream ``RngStream(seed, stream_id=c)`` (with sub-streams for the
two measures), so the result does not depend on how many worker threads
process the chunks or in which order they finish.

Examples
--------
>>> from randfid.samplers import MeasureSpec
>>> spec = ExperimentSpec(MeasureSpec.fubini_study(2), MeasureSpec.fubini_study(2),
...                       n_samples=2000, seed=1)
>>> res = run_experiment(spec)
>>> abs(res.mean - 0.5) < 4 * res.stderr
True
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, interpolate, stats

from . import analytic
from ._config import THREADS_ENV
from .distnum import DistributionCurve
from .errors import DimMismatch, DomainError, EmptySample
from .samplers import BuresMcmcConfig, MeasureSpec, RngStream, sample_batch
from .states import max_mixed_root_fidelity_batch, root_fidelity_batch

__all__ = [
    "ExperimentSpec",
    "ExperimentResult",
    "run_experiment",
    "sample_statistic",
    "ks_statistic",
    "cdf_from_pdf",
    "histogram_curve",
    "jackknife_moments",
    "sweep",
    "resolve_threads",
]

STATISTICS = ("fidelity", "root_fidelity", "max_mixed_fidelity")


@dataclass(frozen=True)
class ExperimentSpec:
    """What to sample and which statistic to evaluate.

    ``measure_b`` is ignored for ``statistic='max_mixed_fidelity'``, which
    compares a single state with ``1/N``.
    """

    measure_a: MeasureSpec
    measure_b: MeasureSpec
    n_samples: int
    seed: int = 0
    statistic: str = "fidelity"
    histogram_bins: int = 100
    chunk_size: int | None = None
    bures: BuresMcmcConfig = field(default_factory=BuresMcmcConfig)

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise DomainError("n_samples must be at least 1")
        if self.statistic not in STATISTICS:
            raise DomainError(f"unknown statistic {self.statistic!r}")
        if self.measure_a.N != self.measure_b.N:
            raise DimMismatch("measures act on different dimensions")
        if self.histogram_bins < 1 or (self.chunk_size is not None and self.chunk_size < 1):
            raise DomainError("histogram_bins and chunk_size must be positive")

    @property
    def effective_chunk(self) -> int:
        """Samples per random stream.

        Bures chains for ``N >= 3`` pay a burn-in per stream, so they get
        larger chunks by default.
        """
        if self.chunk_size is not None:
            return int(self.chunk_size)
        mcmc = any(m.kind == "bures" and m.N >= 3 for m in (self.measure_a, self.measure_b))
        return 25_000 if mcmc else 2000

    @property
    def symmetric(self) -> bool:
        return self.measure_a.canonical() == self.measure_b.canonical()


@dataclass
class ExperimentResult:
    """Aggregated output of :func:`run_experiment`.

    Attributes
    ----------
    mean, stderr : float
    moments, moment_errors : dict
        Raw moments ``m = 1..4`` of the statistic and jackknife errors.
    histogram : DistributionCurve
        Normalized histogram on uniform bins over ``[0, 1]``.
    ks_vs_reference : tuple or None
        ``(D, p_value)`` when a reference CDF was supplied.
    wall_time : float
    seed : int
    samples : ndarray or None
        The raw statistic values (kept when ``keep_samples=True``).
    """

    mean: float
    stderr: float
    moments: dict
    moment_errors: dict
    histogram: DistributionCurve
    ks_vs_reference: tuple | None
    wall_time: float
    seed: int
    n_samples: int
    samples: np.ndarray | None = None


def resolve_threads(threads: int | None = None) -> int:
    """Worker count from the argument, then ``FID_THREADS``, then the CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise DomainError("thread count must be positive")
    return int(threads)


def _chunk_values(spec: ExperimentSpec, chunk: int, count: int) -> np.ndarray:
    stream = RngStream(spec.seed, stream_id=chunk)
    a = sample_batch(spec.measure_a, count, stream.substream(0), spec.bures)
    if spec.statistic == "max_mixed_fidelity":
        return max_mixed_root_fidelity_batch(a) ** 2
    b = sample_batch(spec.measure_b, count, stream.substream(1), spec.bures)
    r = root_fidelity_batch(a, b)
    return r if spec.statistic == "root_fidelity" else r * r


def sample_statistic(spec: ExperimentSpec, threads: int | None = None) -> np.ndarray:
    """All ``n_samples`` values of the statistic, in chunk order."""
    n, size = int(spec.n_samples), spec.effective_chunk
    sizes = [min(size, n - start) for start in range(0, n, size)]
    workers = min(resolve_threads(threads), len(sizes))
    if workers == 1:
        parts = [_chunk_values(spec, c, k) for c, k in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ck: _chunk_values(spec, *ck), enumerate(sizes)))
    return np.concatenate(parts)


def jackknife_moments(x, m_max: int = 4, blocks: int = 100):
    """Raw moments of ``x`` and delete-one-block jackknife errors.

    Parameters
    ----------
    x : array_like
    m_max : int
    blocks : int
        Number of contiguous blocks (reduced to ``len(x)`` if larger).

    Returns
    -------
    moments, errors : dict, dict
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        raise EmptySample("no samples")
    nb = min(blocks, n)
    edges = np.linspace(0, n, nb + 1).astype(int)
    powers = x[:, None] ** np.arange(1, m_max + 1)
    sums = np.add.reduceat(powers, edges[:-1], axis=0)
    counts = np.diff(edges)
    total = sums.sum(axis=0)
    full = total / n
    moments, errors = {}, {}
    if nb < 2:
        err = np.full(m_max, np.nan)
    else:
        loo = (total - sums) / (n - counts)[:, None]
        err = np.sqrt((nb - 1) / nb * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    for m in range(1, m_max + 1):
        moments[m] = float(full[m - 1])
        errors[m] = float(err[m - 1])
    return moments, errors


def histogram_curve(x, bins: int = 100) -> DistributionCurve:
    """Density histogram on uniform bins over ``[0, 1]`` with Poisson errors."""
    x = np.asarray(x, dtype=float)
    counts, edges = np.histogram(np.clip(x, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    width = np.diff(edges)
    n = max(x.size, 1)
    return DistributionCurve(
        0.5 * (edges[1:] + edges[:-1]),
        counts / (n * width),
        np.sqrt(counts) / (n * width),
        provenance="monte-carlo",
        meta={"edges": edges, "counts": counts},
    )


def ks_statistic(samples, reference_cdf):
    """Two-sided Kolmogorov-Smirnov test against a callable CDF.

    Returns
    -------
    (D, p_value) : tuple of float
        ``p_value`` is the asymptotic one.

    Examples
    --------
    >>> rng = np.random.default_rng(0)
    >>> d, p = ks_statistic(rng.uniform(size=1000), lambda x: np.clip(x, 0, 1))
    >>> d < 0.06
    True
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySample("no samples to test")
    res = stats.kstest(x, reference_cdf, method="asymp")
    return float(res.statistic), float(res.pvalue)


def cdf_from_pdf(pdf, n: int = 401, lo: float = 0.0, hi: float = 1.0):
    """Build a CDF on ``[lo, hi]`` by cumulative quadrature of ``pdf``.

    The pdf is sampled at ``F = lo + (hi - lo)(1 - cos(pi t))/2`` on a uniform
    ``t`` grid, which clusters points at both ends and absorbs integrable
    inverse-square-root edges.  The cumulative Simpson integral is
    normalized to end at 1 and interpolated monotonically.

    Parameters
    ----------
    pdf : callable
        Vectorized density on the open interval ``(lo, hi)``.
    n : int
        Number of sample points (odd values suit Simpson's rule).
    """
    t = np.linspace(0.0, 1.0, n)
    F = lo + (hi - lo) * 0.5 * (1 - np.cos(np.pi * t))
    dF = (hi - lo) * 0.5 * np.pi * np.sin(np.pi * t)
    vals = np.zeros(n)
    inner = slice(1, n - 1)
    vals[inner] = np.asarray(pdf(F[inner]), dtype=float) * dF[inner]
    # The endpoints themselves may be singular for the pdf; extrapolate the
    # (smooth) transformed integrand instead of evaluating there.
    vals[0] = max(3 * vals[1] - 3 * vals[2] + vals[3], 0.0)
    vals[-1] = max(3 * vals[-2] - 3 * vals[-3] + vals[-4], 0.0)
    c = integrate.cumulative_simpson(vals, x=t, initial=0.0)
    total = c[-1]
    interp = interpolate.PchipInterpolator(F, np.maximum.accumulate(c / total))

    def cdf(x):
        return np.clip(interp(np.clip(x, lo, hi)), 0.0, 1.0)

    cdf.total = float(total)
    return cdf


def run_experiment(
    spec: ExperimentSpec,
    reference_cdf=None,
    threads: int | None = None,
    keep_samples: bool = False,
) -> ExperimentResult:
    """Sample ``spec.n_samples`` pairs and aggregate the statistic.

    Parameters
    ----------
    spec : ExperimentSpec
    reference_cdf : callable, optional
        CDF for a Kolmogorov-Smirnov comparison.
    threads : int, optional
        Worker cap (default: ``FID_THREADS`` or the CPU count).
    keep_samples : bool
        Keep the raw values on the result.
    """
    t0 = time.perf_counter()
    x = sample_statistic(spec, threads)
    moments, errors = jackknife_moments(x, 4, 100)
    n = x.size
    stderr = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    ks = ks_statistic(x, reference_cdf) if reference_cdf is not None else None
    return ExperimentResult(
        mean=moments[1],
        stderr=stderr,
        moments=moments,
        moment_errors=errors,
        histogram=histogram_curve(x, spec.histogram_bins),
        ks_vs_reference=ks,
        wall_time=time.perf_counter() - t0,
        seed=spec.seed,
        n_samples=n,
        samples=x if keep_samples else None,
    )


def sweep(
    N_values,
    K_values,
    statistic: str = "fidelity",
    n_samples: int = 10_000,
    seed: int = 0,
    threads: int | None = None,
):
    """Symmetric induced-measure means over a grid of ``(N, K)``.

    Returns a list of row dictionaries with keys ``N``, ``K``, ``mc_mean``,
    ``mc_err``, ``analytic`` and ``provenance``.  Each grid point gets its own
    seed derived from ``(seed, N, K)``.
    """
    stat = {"fidelity": "f", "root_fidelity": "sqrtf"}.get(statistic)
    if stat is None:
        raise DomainError("sweep supports 'fidelity' and 'root_fidelity'")
    rows = []
    for N in N_values:
        for K in K_values:
            m = MeasureSpec.induced(N, K)
            row = {"N": int(N), "K": int(K)}
            if n_samples:
                sub = int(np.random.SeedSequence([seed, N, K]).generate_state(1)[0])
                res = run_experiment(ExperimentSpec(m, m, n_samples, sub, statistic), threads=threads)
                row.update(mc_mean=res.mean, mc_err=res.stderr)
            est = analytic.estimate_mean(N, K, stat, "closed")
            row.update(analytic=est.value, provenance=est.provenance)
            rows.append(row)
    return rows
