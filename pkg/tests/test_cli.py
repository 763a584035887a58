import csv
import io
import json
import math

import numpy as np
import pytest

from randfid import analytic, cli
from randfid.states import validate_state


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    rec = json.loads(out)
    assert rec["schema_version"] == cli.SCHEMA_VERSION
    return rec


class TestSample:
    def test_round_trip(self, capsys, tmp_path):
        path = tmp_path / "states.json"
        code, _, _ = run(capsys, "sample", "--measure", "induced", "--n-dim", "3", "--k-dim", "2",
                         "--count", "4", "--seed", "7", "--out", str(path))
        assert code == 0
        mats = cli.read_states(path)
        assert mats.shape == (4, 3, 3)
        for m in mats:
            validate_state(m)
        # rank K = 2 < N = 3
        assert np.all(np.linalg.eigvalsh(mats)[:, 0] < 1e-12)

    def test_deterministic(self, capsys):
        a = run_json(capsys, "sample", "--measure", "hs", "--n-dim", "2", "--count", "3", "--seed", "1")
        b = run_json(capsys, "sample", "--measure", "hs", "--n-dim", "2", "--count", "3", "--seed", "1")
        assert a["results"]["states"] == b["results"]["states"]

    @pytest.mark.parametrize(
        "argv",
        [
            ["--measure", "induced", "--n-dim", "2", "--k-dim", "0"],
            ["--measure", "hs", "--n-dim", "2", "--k-dim", "0"],
            ["--measure", "induced", "--n-dim", "2"],
            ["--measure", "hs", "--n-dim", "0"],
            ["--measure", "hs", "--n-dim", "2", "--count", "0"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, err = run(capsys, "sample", *argv)
        assert code == cli.EXIT_USAGE
        assert out == ""
        assert "error" in err

    def test_argparse_error_is_usage(self, capsys):
        code, _, _ = run(capsys, "sample", "--measure", "nonsense", "--n-dim", "2")
        assert code == cli.EXIT_USAGE


class TestMean:
    def test_closed_22(self, capsys):
        rec = run_json(capsys, "mean", "--n-dim", "2", "--k-dim", "2")
        r = rec["results"]["routes"]["closed"]
        assert r["value"] == pytest.approx(0.5 + 9 * math.pi**2 / 512, abs=1e-12)
        assert r["provenance"] == "closed-form"

    def test_root_fidelity_31(self, capsys):
        rec = run_json(capsys, "mean", "--n-dim", "3", "--k-dim", "1", "--statistic", "sqrtf")
        assert rec["results"]["routes"]["closed"]["value"] == pytest.approx(8 / 15, abs=1e-12)

    def test_all_routes_agree(self, capsys):
        rec = run_json(capsys, "mean", "--n-dim", "2", "--k-dim", "3", "--method", "all",
                       "--samples", "20000", "--seed", "3")
        routes = rec["results"]["routes"]
        assert routes["series"]["value"] == pytest.approx(routes["closed"]["value"], abs=1e-12)
        mc = routes["mc"]
        assert abs(mc["value"] - routes["closed"]["value"]) < 5 * mc["error"]

    def test_csv_grid(self, capsys):
        code, out, _ = run(capsys, "mean", "--n-dim", "2:4", "--k-dim", "2,3", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 6
        assert {r["N"] for r in rows} == {"2", "3", "4"}
        for r in rows:
            N, K = int(r["N"]), int(r["K"])
            assert float(r["closed"]) == pytest.approx(analytic.mean_fidelity_NK(N, K), rel=1e-11)

    def test_non_integer_k_skips_unavailable_routes(self, capsys):
        rec = run_json(capsys, "mean", "--n-dim", "2", "--k-dim", "1.5", "--method", "all", "--samples", "100")
        routes = rec["results"]["routes"]
        assert "mc" not in routes and "series" not in routes
        assert routes["closed"]["value"] == pytest.approx(0.5 + 8 / (9 * math.pi**2), abs=1e-12)

    def test_explicit_unavailable_route_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "mean", "--n-dim", "2", "--k-dim", "1.5", "--method", "series")
        assert code == cli.EXIT_USAGE

    def test_bad_k(self, capsys):
        code, _, _ = run(capsys, "mean", "--n-dim", "2", "--k-dim", "0")
        assert code == cli.EXIT_USAGE


class TestDist:
    def test_pure_pure_qubit_is_flat(self, capsys):
        code, out, _ = run(capsys, "dist", "--family", "pure-pure", "--n-dim", "2", "--grid", "10")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# family=pure-pure")
        rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
        assert len(rows) == 10
        np.testing.assert_allclose([float(r["pdf"]) for r in rows], 1.0, atol=1e-12)

    def test_overlay_reports_ks(self, capsys):
        code, out, _ = run(capsys, "dist", "--family", "sym-2k", "--k-dim", "2", "--grid", "20",
                           "--mc-overlay", "5000", "--bins", "20", "--seed", "4")
        assert code == 0
        ks_line = [l for l in out.splitlines() if l.startswith("# ks_statistic=")]
        assert len(ks_line) == 1
        p = float(ks_line[0].split("ks_p_value=")[1].split()[0])
        assert p > 1e-3
        header = [l for l in out.splitlines() if not l.startswith("#")][0]
        assert header == "F,pdf,hist,hist_err"

    def test_json(self, capsys):
        rec = run_json(capsys, "dist", "--family", "pure-hs", "--n-dim", "3", "--grid", "5", "--format", "json")
        res = rec["results"]
        assert len(res["F"]) == len(res["pdf"]) == 5
        assert res["provenance"]["pdf"] == "closed-form"

    def test_mc_only_family_needs_overlay(self, capsys):
        code, _, err = run(capsys, "dist", "--family", "sym-nk", "--n-dim", "3", "--k-dim", "2")
        assert code == cli.EXIT_USAGE
        assert "overlay" in err

    def test_bad_grid(self, capsys):
        code, _, _ = run(capsys, "dist", "--family", "pure-pure", "--grid", "0")
        assert code == cli.EXIT_USAGE


class TestGauge:
    def test_values(self, capsys):
        rec = run_json(capsys, "gauge", "--n-dim", "2", "--k-dim", "2", "--f-tilde", "0.9")
        res = rec["results"]
        mean, sq = res["mean_f"]["value"], res["mean_f2"]["value"]
        assert mean == pytest.approx(analytic.mean_fidelity_NK(2, 2), abs=1e-10)
        assert res["alpha"] == pytest.approx((0.9 - mean) / math.sqrt(sq - mean**2), rel=1e-12)

    def test_scalar_state_has_no_spread(self, capsys):
        code, _, err = run(capsys, "gauge", "--n-dim", "1", "--k-dim", "1", "--f-tilde", "1")
        assert code == cli.EXIT_COMPUTE
        assert "DegenerateVariance" in err

    def test_f_tilde_range(self, capsys):
        code, _, _ = run(capsys, "gauge", "--n-dim", "2", "--k-dim", "2", "--f-tilde", "1.5")
        assert code == cli.EXIT_USAGE


class TestVerify:
    def test_single_criterion_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "1")
        assert code == cli.EXIT_OK
        assert "[PASS] criterion 1" in out

    def test_corrupted_reference_fails(self, capsys, monkeypatch):
        real = analytic.mean_fidelity_NK
        monkeypatch.setattr(analytic, "mean_fidelity_NK", lambda N, K: real(N, K) + 1e-6)
        code, out, _ = run(capsys, "verify", "--only", "1")
        assert code == cli.EXIT_VERIFY
        assert "[FAIL] criterion 1" in out


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "randfid", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("randfid")
