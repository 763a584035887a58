"""Command-line front end (``randfid`` or ``python -m randfid``).

Subcommands
-----------
sample   draw density matrices and write them as JSON
mean     symmetric mean fidelity (closed form, series, Monte Carlo, or all)
dist     fidelity density on a grid as CSV, optionally with an MC histogram
verify   run the acceptance battery
gauge    the z-score of a protocol fidelity against random pairs

Exit codes: 0 success, 2 invalid usage, 3 computation error, 4 failed
verification.  Data goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, analytic
from .curves import FAMILIES, dist_curve, law, midpoint_grid
from .errors import DimMismatch, DomainError, FidelityError
from .montecarlo import ExperimentSpec, resolve_threads, run_experiment
from .samplers import MeasureSpec, RngStream, sample_batch

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return f"{x:.12g}"


def _record(command, params, results):
    return {"schema_version": SCHEMA_VERSION, "command": command, "parameters": params, "results": results}


def _emit_json(obj, out=None):
    out = out or sys.stdout
    json.dump(obj, out, indent=2, allow_nan=True)
    out.write("\n")


def _int_list(text: str):
    """Parse ``3``, ``2,3,5`` or an inclusive range ``2:6``."""
    vals = []
    for part in str(text).split(","):
        if ":" in part:
            a, b = part.split(":")
            vals.extend(range(int(a), int(b) + 1))
        else:
            vals.append(float(part) if "." in part else int(part))
    return vals


def _measure(kind, N, K):
    if N is None or N < 1:
        raise UsageError("--n-dim must be a positive integer")
    if K is not None and K < 1:
        raise UsageError("--k-dim must be a positive integer")
    if kind in ("induced", "real"):
        if K is None or K < 1:
            raise UsageError("--k-dim must be a positive integer for induced measures")
        return MeasureSpec(kind, N, K)
    return MeasureSpec(kind, N)


# ------------------------------------------------------------------ sample


def cmd_sample(args) -> int:
    spec = _measure(args.measure, args.n_dim, args.k_dim)
    if args.count < 1:
        raise UsageError("--count must be positive")
    mats = sample_batch(spec, args.count, RngStream(args.seed))
    states = [
        {"dim": int(m.shape[0]), "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m]}
        for m in mats
    ]
    rec = _record(
        "sample",
        {"measure": args.measure, "n_dim": args.n_dim, "k_dim": args.k_dim, "count": args.count, "seed": args.seed},
        {"states": states, "provenance": "monte-carlo", "label": spec.label()},
    )
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            _emit_json(rec, fh)
    else:
        _emit_json(rec)
    return EXIT_OK


def read_states(path):
    """Load the matrices written by ``randfid sample`` as a complex array."""
    with open(path) as fh:
        rec = json.load(fh)
    mats = [np.array([[complex(re, im) for re, im in row] for row in s["entries"]]) for s in rec["results"]["states"]]
    return np.array(mats)


# ------------------------------------------------------------------ mean


def _mean_routes(N, K, stat, method, samples, seed, threads):
    routes = ["closed", "series", "mc"] if method == "all" else [method]
    out = {}
    for r in routes:
        if r == "mc":
            if int(K) != K:
                continue
            m = MeasureSpec.induced(N, int(K))
            st = "fidelity" if stat == "f" else "root_fidelity"
            res = run_experiment(ExperimentSpec(m, m, samples, seed, st), threads=threads)
            out[r] = {"value": res.mean, "error": res.stderr, "provenance": "monte-carlo"}
        else:
            try:
                est = analytic.estimate_mean(N, K, stat, r)
            except DomainError:
                if method != "all":
                    raise
                continue
            out[r] = {"value": est.value, "error": est.error, "provenance": est.provenance}
    return out


def cmd_mean(args) -> int:
    Ns, Ks = _int_list(args.n_dim), _int_list(args.k_dim)
    if any(n < 1 for n in Ns) or any(k <= 0 for k in Ks):
        raise UsageError("--n-dim and --k-dim must be positive")
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    threads = resolve_threads(args.threads)
    rows = []
    for N in Ns:
        for K in Ks:
            sub = args.seed if len(Ns) * len(Ks) == 1 else int(np.random.SeedSequence([args.seed, N, int(K * 2)]).generate_state(1)[0])
            rows.append({"N": N, "K": K, "routes": _mean_routes(N, K, args.statistic, args.method, args.samples, sub, threads)})
    if args.format == "csv":
        routes = sorted({r for row in rows for r in row["routes"]})
        head = ["N", "K"] + [f"{r}{suffix}" for r in routes for suffix in ("", "_err")]
        print(",".join(head))
        for row in rows:
            cells = [str(row["N"]), _fmt(row["K"])]
            for r in routes:
                v = row["routes"].get(r)
                cells += [_fmt(v["value"]), _fmt(v["error"])] if v else ["", ""]
            print(",".join(cells))
    else:
        params = {k: getattr(args, k) for k in ("n_dim", "k_dim", "method", "statistic", "samples", "seed")}
        _emit_json(_record("mean", params, rows if len(rows) > 1 else rows[0]))
    return EXIT_OK


# ------------------------------------------------------------------ dist


def cmd_dist(args) -> int:
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family}")
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    lw = law(args.family, args.n_dim, args.k_dim, args.real)
    curve = dist_curve(lw, midpoint_grid(args.grid), args.mc_overlay, args.seed, args.bins, resolve_threads(args.threads))
    cols = ["F", "pdf"] + (["hist", "hist_err"] if args.mc_overlay else [])
    if args.format == "json":
        res = {c: [float(v) for v in curve[c]] for c in cols}
        res["provenance"] = {"pdf": curve["provenance"], "hist": "monte-carlo"}
        if curve.get("ks"):
            res["ks_statistic"], res["ks_p_value"] = curve["ks"]
        params = {k: getattr(args, k) for k in ("family", "n_dim", "k_dim", "real", "grid", "mc_overlay", "seed", "bins")}
        _emit_json(_record("dist", params, res))
        return EXIT_OK
    print(f"# family={args.family} n_dim={args.n_dim} k_dim={args.k_dim} provenance={curve['provenance']}")
    if curve.get("ks"):
        print(f"# ks_statistic={_fmt(curve['ks'][0])} ks_p_value={_fmt(curve['ks'][1])} mc_samples={args.mc_overlay}")
    print(",".join(cols))
    for i in range(len(curve["F"])):
        print(",".join(_fmt(curve[c][i]) for c in cols))
    return EXIT_OK


# ------------------------------------------------------------------ verify


def cmd_verify(args) -> int:
    from .verify import format_table, run_suite

    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_suite(args.suite, args.seed, only=only, echo=lambda line: print(line, file=sys.stderr))
    print(format_table(results))
    print()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ------------------------------------------------------------------ gauge


def gauge(N: int, K: float, f_tilde: float) -> dict:
    """Gauge coefficient with the moments used and their provenance."""
    if N == 1:
        mom = {2: 1.0, 4: 1.0}
        err = {2: 0.0, 4: 0.0}
        prov = "closed-form"
    else:
        t = analytic.moment_root_fidelity_series(N, K, 4)
        mom, err, prov = t.moments, t.errors, "series" if K >= N else "continued"
    alpha = analytic.gauge_alpha(f_tilde, mom[2], mom[4])
    return {
        "alpha": alpha,
        "mean_f": {"value": mom[2], "error": err[2], "provenance": prov},
        "mean_f2": {"value": mom[4], "error": err[4], "provenance": prov},
        "f_tilde": f_tilde,
    }


def cmd_gauge(args) -> int:
    if args.n_dim < 1 or args.k_dim <= 0:
        raise UsageError("--n-dim and --k-dim must be positive")
    if not 0 <= args.f_tilde <= 1:
        raise UsageError("--f-tilde must lie in [0, 1]")
    res = gauge(args.n_dim, args.k_dim, args.f_tilde)
    params = {"n_dim": args.n_dim, "k_dim": args.k_dim, "f_tilde": args.f_tilde}
    _emit_json(_record("gauge", params, res))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="randfid", description="Fidelity statistics of random quantum states.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $FID_THREADS or CPU count)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample density matrices")
    s.add_argument("--measure", choices=["induced", "hs", "bures", "fs", "real"], required=True)
    s.add_argument("--n-dim", type=int, required=True)
    s.add_argument("--k-dim", type=int, default=None)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sample)

    m = sub.add_parser("mean", help="symmetric mean fidelity")
    m.add_argument("--n-dim", required=True, help="N, a list 2,3 or a range 2:6")
    m.add_argument("--k-dim", required=True, help="K, a list or a range; non-integers allowed for analytic routes")
    m.add_argument("--method", choices=["closed", "series", "mc", "all"], default="closed")
    m.add_argument("--statistic", choices=["f", "sqrtf"], default="f")
    m.add_argument("--samples", type=int, default=100_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--format", choices=["json", "csv"], default="json")
    m.set_defaults(func=cmd_mean)

    d = sub.add_parser("dist", help="fidelity density on a grid")
    d.add_argument("--family", choices=FAMILIES, required=True)
    d.add_argument("--n-dim", type=int, default=2)
    d.add_argument("--k-dim", type=float, default=None)
    d.add_argument("--real", action="store_true", help="real states (pure-induced / pure-hs only)")
    d.add_argument("--grid", type=int, default=50, help="number of midpoints on [0, 1]")
    d.add_argument("--mc-overlay", type=int, default=0, metavar="SAMPLES")
    d.add_argument("--bins", type=int, default=100)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--format", choices=["csv", "json"], default="csv")
    d.set_defaults(func=cmd_dist)

    v = sub.add_parser("verify", help="run the acceptance battery")
    v.add_argument("--suite", choices=["fast", "full"], default="fast")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--only", default=None, help="comma-separated criterion numbers")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gauge", help="z-score of a protocol fidelity")
    g.add_argument("--n-dim", type=int, required=True)
    g.add_argument("--k-dim", type=float, required=True)
    g.add_argument("--f-tilde", type=float, required=True)
    g.set_defaults(func=cmd_gauge)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (UsageError, DomainError, DimMismatch) as exc:
        print(f"randfid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FidelityError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"randfid: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    print(f"randfid: {args.command} finished in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
