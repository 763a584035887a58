"""Acceptance battery: analytic constants, route agreement, Monte Carlo checks.

Each criterion is a function returning a :class:`CriterionResult` made of
individual :class:`Check` rows.  ``suite='full'`` runs at the documented
sample sizes; ``suite='fast'`` uses smaller Monte Carlo runs (and a few
fewer parameter points) so that it finishes in well under two minutes.

Examples
--------
>>> r = criterion_1()
>>> r.passed
True
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import analytic, distnum, states
from .curves import dist_curve, law, mean_table, midpoint_grid
from .montecarlo import ExperimentSpec, run_experiment
from .samplers import MeasureSpec, RngStream, sample_batch, sample_bures, sample_induced, sample_pure

__all__ = ["Check", "CriterionResult", "CRITERIA", "run_suite", "format_table"]


@dataclass
class Check:
    label: str
    value: float
    reference: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def worst(self) -> Check | None:
        bad = [c for c in self.checks if not c.passed]
        return bad[0] if bad else None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        w = self.worst()
        if w is not None:
            extra = f"  first failure: {w.label} value={w.value:.6g} ref={w.reference:.6g} tol={w.tolerance:.3g}"
        return f"[{status}] criterion {self.number}: {self.title} ({len(self.checks)} checks, {self.seconds:.1f}s){extra}"


def _abs(label, value, ref, tol, note=""):
    return Check(label, float(value), float(ref), tol, bool(abs(value - ref) <= tol), note)


def _sigma(label, mean, err, ref, k=4.0):
    z = (mean - ref) / err if err > 0 else math.inf
    return Check(label, float(mean), float(ref), k * err, bool(abs(z) <= k), f"z={z:+.2f}")


def _at_least(label, value, floor, note=""):
    return Check(label, float(value), float(floor), 0.0, bool(value >= floor), note)


def _at_most(label, value, ceil, note=""):
    return Check(label, float(value), float(ceil), 0.0, bool(value <= ceil), note)


def _timed(number, title):
    def deco(fn):
        def run(suite="full", seed=0):
            t0 = time.perf_counter()
            res = CriterionResult(number, title, fn(suite, seed))
            res.seconds = time.perf_counter() - t0
            return res

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return deco


# ------------------------------------------------------------------ 1


@_timed(1, "closed-form constants")
def criterion_1(suite="full", seed=0):
    tol = 1e-10
    pi = math.pi
    return [
        _abs("<F>_{2,2}", analytic.mean_fidelity_NK(2, 2), 0.5 + 9 * pi**2 / 512, tol),
        _abs("<F>_{2,3}", analytic.mean_fidelity_NK(2, 3), 0.5 + (15 * math.sqrt(2) * pi / 128) ** 2, tol),
        _abs("<F>_Bures(2)", analytic.mean_fidelity_2K(1.5), 0.5 + 8 / (9 * pi**2), tol),
        _abs("<F>_{3,2}", analytic.mean_fidelity_NK(3, 2), 1 / 3 + 15 * (pi / 32) ** 2, tol),
        _abs("<sqrtF>_{2,1}", analytic.mean_root_fidelity_NK(2, 1), 2 / 3, tol),
        _abs("<sqrtF>_{3,1}", analytic.mean_root_fidelity_NK(3, 1), 8 / 15, tol),
        _abs("p_2", analytic.cloning_exceed_prob(2), 1 / 6, tol),
    ]


# ------------------------------------------------------------------ 2


@_timed(2, "route cross-validation")
def criterion_2(suite="full", seed=0):
    tol = 1e-9
    out = []
    for K in range(2, 11):
        out.append(_abs(f"X vs explicit sqrtF N=2 K={K}", analytic.mean_root_fidelity_NK(2, K),
                        analytic.mean_root_fidelity_2K_explicit(K), tol))
        out.append(_abs(f"X vs explicit F N=2 K={K}", analytic.mean_fidelity_NK(2, K),
                        analytic.mean_fidelity_2K(K), tol))
    for K in range(3, 12):
        out.append(_abs(f"X vs explicit sqrtF N=3 K={K}", analytic.mean_root_fidelity_NK(3, K),
                        analytic.mean_root_fidelity_3K_explicit(K), tol))
        out.append(_abs(f"X vs explicit F N=3 K={K}", analytic.mean_fidelity_NK(3, K),
                        analytic.mean_fidelity_3K_explicit(K), tol))
    for N, K in [(2, 2), (3, 3), (3, 4), (4, 4), (4, 2), (5, 2)]:
        t = analytic.moment_root_fidelity_series(N, K, 2)
        out.append(_abs(f"series vs X sqrtF ({N},{K})", t[1], analytic.mean_root_fidelity_NK(N, K), tol))
        out.append(_abs(f"series vs X F ({N},{K})", t[2], analytic.mean_fidelity_NK(N, K), tol))
    for N in range(3, 7):
        t = analytic.moment_root_fidelity_series(N, 2, 2)
        out.append(_abs(f"K=2 form vs series sqrtF N={N}", analytic.mean_root_fidelity_N2_explicit(N), t[1], tol))
        out.append(_abs(f"K=2 form vs series F N={N}", analytic.mean_fidelity_N2_explicit(N), t[2], tol))
    return out


# ------------------------------------------------------------------ 3


def _n(suite, full):
    return full if suite == "full" else max(full // 5, 2000)


@_timed(3, "Monte Carlo means vs analytics")
def criterion_3(suite="full", seed=0):
    n = _n(suite, 100_000)
    out = []

    def mc(a, b, stat="fidelity", s=0):
        return run_experiment(ExperimentSpec(a, b, n, seed * 1000 + s, stat))

    for i, (N, K) in enumerate([(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 4)]):
        m = MeasureSpec.induced(N, K)
        r = mc(m, m, s=i)
        out.append(_sigma(f"<F>_{{{N},{K}}}", r.mean, r.stderr, analytic.mean_fidelity_NK(N, K)))
    r = mc(MeasureSpec.bures(2), MeasureSpec.bures(2), s=10)
    out.append(_sigma("<F>_Bures(2)", r.mean, r.stderr, 0.5 + 8 / (9 * math.pi**2)))
    for N in (2, 3, 4):
        m = MeasureSpec.fubini_study(N)
        r = mc(m, m, s=20 + N)
        out.append(_sigma(f"<F>_FS N={N}", r.mean, r.stderr, 1 / N))
    for j, (N, K) in enumerate([(2, 2), (3, 5), (4, 2)]):
        x = sample_batch(MeasureSpec.induced(N, K), n, RngStream(seed, 30 + j))
        p = np.einsum("nij,nji->n", x, x).real
        out.append(_sigma(f"<Tr rho^2>_{{{N},{K}}}", p.mean(), p.std(ddof=1) / math.sqrt(n),
                          analytic.mean_purity(N, K)))
    return out


# ------------------------------------------------------------------ 4


def _ks_check(label, curve, alpha=0.01):
    d, p = curve["ks"]
    return Check(label, p, alpha, 0.0, bool(p >= alpha), f"D={d:.4f}")


@_timed(4, "distribution goodness of fit")
def criterion_4(suite="full", seed=0):
    n = _n(suite, 100_000)
    grid = midpoint_grid(20)
    cases = [
        ("pure-pure N=2", law("pure-pure", 2)),
        ("pure-pure N=4", law("pure-pure", 4)),
        ("pure-induced (2,2)", law("pure-induced", 2, 2)),
        ("pure-induced (3,3)", law("pure-induced", 3, 3)),
        ("sym qubit Bures K=3/2", law("sym-2k", 2, 1.5)),
        ("sym qubit HS K=2", law("sym-2k", 2, 2)),
        ("rebit pure vs real HS", law("pure-induced", 2, 2, real=True)),
        ("pure vs Bures N=3", law("pure-bures", 3)),
    ]
    return [_ks_check(lbl, dist_curve(lw, grid, n, seed + 40 + i)) for i, (lbl, lw) in enumerate(cases)]


# ------------------------------------------------------------------ 5


@_timed(5, "W(sqrt F) pipeline")
def criterion_5(suite="full", seed=0):
    grid = midpoint_grid(50)
    out = []
    w22 = distnum.WPipeline(2, 2)
    ref = analytic.pdf_fidelity_2K_closed(grid, 2)
    out.append(_abs("(2,2) max pointwise error", float(np.max(np.abs(w22.pdf(grid) - ref))), 0.0, 1e-4))
    w23 = distnum.WPipeline(2, 3)
    ref = analytic.pdf_fidelity_2K_closed(grid, 3)
    out.append(_abs("(2,3) max pointwise error", float(np.max(np.abs(w23.pdf(grid) - ref))), 0.0, 1e-4))
    w33 = distnum.WPipeline(3, 3)
    out.append(_abs("(3,3) <sqrtF>", w33.moment(1), analytic.mean_root_fidelity_NK(3, 3), 1e-3))
    out.append(_abs("(3,3) <F>", w33.moment(2), analytic.mean_fidelity_NK(3, 3), 1e-3))
    for name, w in (("(2,2)", w22), ("(2,3)", w23), ("(3,3)", w33)):
        out.append(_abs(f"{name} normalization factor", w.normalization, 1.0, 0.01))
    return out


# ------------------------------------------------------------------ 6


@_timed(6, "asymptotics")
def criterion_6(suite="full", seed=0):
    out = []
    n = 10_000 if suite == "full" else 2000
    hs = MeasureSpec.hilbert_schmidt(64)
    r = run_experiment(ExperimentSpec(hs, hs, n, seed + 60, "max_mixed_fidelity"), keep_samples=True)
    m = float(np.mean(np.sqrt(r.samples)))
    lim = analytic.asymptotic_trace_moment(0.5, "hs")
    out.append(Check("HS N=64 <Tr sqrt(rho)>/sqrt(N)", m, lim, 0.015 * lim, abs(m / lim - 1) <= 0.015,
                     f"8/(3 pi) = {8 / (3 * math.pi):.6f}"))
    blim = analytic.asymptotic_trace_moment(0.5, "bures")
    nb = 10_000 if suite == "full" else 3000
    vals = []
    for N in range(2, 7):
        b = MeasureSpec.bures(N)
        r = run_experiment(ExperimentSpec(b, b, nb, seed + 70 + N, "max_mixed_fidelity"), keep_samples=True)
        vals.append(float(np.mean(np.sqrt(r.samples))))
    steps = np.diff(vals)
    out.append(Check("Bures N=2..6 decreasing", float(steps.max()), 0.0, 0.0, bool(np.all(steps < 0)),
                     " ".join(f"{v:.4f}" for v in vals)))
    out.append(Check("Bures N=6 above limit", vals[-1], blim, 0.0, bool(vals[-1] > blim), f"limit {blim:.4f}"))
    F = np.linspace(0.5, 0.999, 500)
    c = analytic.pdf_fidelity_2K_closed(F, 10)
    i = int(np.argmax(c))
    near = slice(max(i - 10, 0), i + 11)
    s = analytic.pdf_fidelity_2K_asymptotic(F[near], 10)
    rel = float(np.max(np.abs(s / c[near] - 1)))
    out.append(Check("K=10 asymptotic vs exact near mode", rel, 0.0, 0.10, rel <= 0.10, f"mode F={F[i]:.4f}"))
    return out


# ------------------------------------------------------------------ 7


def _normalizes(label, pdf, tol=1e-3):
    total = integrate.quad(lambda f: float(pdf(f)), 0, 1, limit=200, points=[0.5, 0.9, 0.99])[0]
    return _abs(label, total, 1.0, tol)


@_timed(7, "property suites")
def criterion_7(suite="full", seed=0):
    out = []
    g = np.random.default_rng(seed + 700)
    worst = 0.0
    for N in (2, 3, 5):
        for _ in range(20):
            a, b = sample_induced(N, N, g), sample_induced(N, 2, g)
            u = np.linalg.qr(g.standard_normal((N, N)) + 1j * g.standard_normal((N, N)))[0]
            ua = states.validate_state(u @ a.entries @ u.conj().T)
            ub = states.validate_state(u @ b.entries @ u.conj().T)
            f = states.fidelity(a, b)
            worst = max(
                worst,
                abs(f - states.fidelity(b, a)),
                abs(f - states.fidelity(ua, ub)),
                abs(states.fidelity(a, a) - 1),
                abs(states.bures_distance(a, b) ** 2 - (2 - 2 * math.sqrt(f))),
                abs(states.fidelity_max_mixed(a) - states.fidelity(a, np.eye(N) / N)),
            )
            psi = sample_pure(N, g)
            worst = max(worst, abs(states.fidelity_pure_mixed(psi, b) - states.fidelity(psi.projector(), b)))
            if N == 2:
                worst = max(worst, abs(states.fidelity_n2(a, b) - f))
    out.append(_abs("metric identities (max deviation)", worst, 0.0, 1e-10))
    x1 = sample_batch(MeasureSpec.induced(3, 2), 50, RngStream(seed, 5))
    x2 = sample_batch(MeasureSpec.induced(3, 2), 50, RngStream(seed, 5))
    b1 = sample_bures(3, RngStream(seed, 6)).entries
    b2 = sample_bures(3, RngStream(seed, 6)).entries
    out.append(Check("sampler determinism", 0.0, 0.0, 0.0, bool(np.array_equal(x1, x2) and np.array_equal(b1, b2))))
    mono, jensen = True, True
    for N in range(2, 5):
        means = [analytic.mean_fidelity_NK(N, K) for K in range(1, 9)]
        mono &= bool(np.all(np.diff(means) > 0))
        for K in range(1, 9):
            r, f = analytic.mean_root_fidelity_NK(N, K), analytic.mean_fidelity_NK(N, K)
            jensen &= bool(r * r <= f <= r)
    out.append(Check("<F> increasing in K (N=2..4, K=1..8)", 0.0, 0.0, 0.0, mono))
    out.append(Check("<sqrtF>^2 <= <F> <= <sqrtF>", 0.0, 0.0, 0.0, jensen))
    for N in (2, 3, 5):
        out.append(_normalizes(f"pure-pure N={N}", lambda f: analytic.pdf_pure_pure(N, f)))
        out.append(_normalizes(f"pure-induced N={N} K=2.5", lambda f: analytic.pdf_pure_induced(N, 2.5, f)))
        out.append(_normalizes(f"real pure-induced N={N} K=3", lambda f: analytic.pdf_pure_induced(N, 3, f, True)))
        out.append(_normalizes(f"pure-bures N={N}", lambda f: distnum.pdf_pure_bures(N, f)))
    for K in (1.5, 2, 3.5, 6):
        out.append(_normalizes(f"sym-2k closed K={K}", lambda f: analytic.pdf_fidelity_2K_closed(f, K)))
    out.append(_normalizes("sym-2k integral K=2.7", lambda f: distnum.pdf_fidelity_2K_integral(f, 2.7)))
    out.append(_normalizes("sym-2k asymptotic K=10", lambda f: analytic.pdf_fidelity_2K_asymptotic(f, 10)))
    for N, K in ((2, 2), (3, 3)) if suite == "fast" else ((2, 2), (3, 3), (3, 4), (4, 4)):
        w = distnum.WPipeline(N, K)
        phis, wts = distnum._phi_rule()
        total = float(wts @ np.array([w.pdf(p * p) * 2 * p for p in phis]))
        out.append(_abs(f"sym-nk ({N},{K}) renormalized", total, 1.0, 1e-3))
    return out


# ------------------------------------------------------------------ 8


@_timed(8, "figure data")
def criterion_8(suite="full", seed=0):
    out = []
    n = _n(suite, 100_000)
    grid = midpoint_grid(20)
    # pure vs HS and pure vs Bures, N = 2..4
    for N in (2, 3, 4):
        for fam in ("pure-hs", "pure-bures"):
            if suite == "fast" and fam == "pure-bures" and N == 4:
                continue
            c = dist_curve(law(fam, N), grid, n, seed + 800 + N)
            out.append(_ks_check(f"{fam} N={N}", c))
    # mean table N = 2..6, K = 1..8 with MC points
    nm = 10_000 if suite == "full" else 2000
    Ks = range(1, 9) if suite == "full" else (1, 2, 4, 8)
    rows = mean_table(range(2, 7), Ks, "fidelity", nm, seed + 850)
    bad = [r for r in rows if abs(r["mc_mean"] - r["analytic"]) > 4 * r["mc_err"]]
    out.append(Check(f"mean table MC within 4 sigma ({len(rows)} points)", float(len(bad)), 0.0, 0.0, not bad,
                     ", ".join(f"({r['N']},{r['K']})" for r in bad)))
    diag = [r["analytic"] for r in rows if r["N"] == r["K"]]
    out.append(Check("HS diagonal decreasing in N", 0.0, 0.0, 0.0, bool(np.all(np.diff(diag) < 0))))
    row32 = next(r for r in rows if (r["N"], r["K"]) == (3, 2))
    out.append(_abs("<F>_{3,2} table entry", row32["analytic"], 0.4779, 5e-5))
    # symmetric laws N = 3, 4 and K = 1..4
    cases = [(3, 1), (3, 3), (3, 4), (4, 1), (4, 4)]
    if suite == "fast":
        cases = [(3, 1), (3, 3)]
    for N, K in cases:
        c = dist_curve(law("sym-nk", N, K), grid, n, seed + 900 + 10 * N + K)
        out.append(_ks_check(f"sym-nk ({N},{K})", c))
        if K > 1:
            out.append(_at_most(f"sym-nk ({N},{K}) KS D", c["ks"][0], 0.02))
    return out


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def run_suite(suite: str = "fast", seed: int = 0, only=None, echo=None):
    """Run the battery and return the list of :class:`CriterionResult`.

    ``echo`` is called with each result line as soon as it is available.
    """
    if suite not in ("fast", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    results = []
    for fn in CRITERIA:
        if only and int(fn.__name__.rsplit("_", 1)[1]) not in only:
            continue
        r = fn(suite, seed)
        results.append(r)
        if echo:
            echo(r.line())
    return results


def format_table(results) -> str:
    rows = []
    for r in results:
        for c in r.checks:
            rows.append(f"{r.number}  {'ok  ' if c.passed else 'FAIL'}  {c.label:<45s} {c.value:>14.8g} {c.reference:>14.8g}  {c.note}")
    return "\n".join(rows)
